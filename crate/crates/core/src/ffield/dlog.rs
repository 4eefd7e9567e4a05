use rustc_hash::FxHashMap;

use super::PrimeField;

const TABLE_LIMIT: u64 = 1 << 22;

/// Discrete logarithms to a base of order `e` in F_l^*.
pub struct DiscreteLog {
    field: PrimeField,
    base: u64,
    order: u64,
    strategy: Strategy,
}

enum Strategy {
    Table(Vec<u32>),
    BabyGiant {
        baby: FxHashMap<u64, u64>,
        step: u64,
        giant: u64,
    },
}

impl DiscreteLog {
    pub fn new(field: PrimeField, base: u64, order: u64) -> Self {
        let strategy = if field.p() <= TABLE_LIMIT {
            let mut table = vec![u32::MAX; field.p() as usize];
            let mut x = 1;
            for i in 0..order {
                table[x as usize] = i as u32;
                x = field.mul(x, base);
            }
            Strategy::Table(table)
        } else {
            let step = (order as f64).sqrt().ceil() as u64;
            let mut baby = FxHashMap::default();
            let mut x = 1;
            for j in 0..step {
                baby.entry(x).or_insert(j);
                x = field.mul(x, base);
            }
            let giant = field.inv(field.pow(base, step));
            Strategy::BabyGiant { baby, step, giant }
        };
        Self {
            field,
            base,
            order,
            strategy,
        }
    }

    pub fn base(&self) -> u64 {
        self.base
    }

    /// The exponent t in [0, e) with base^t = value, if value is a power.
    pub fn log(&self, value: u64) -> Option<u64> {
        let value = self.field.reduce(value);
        match &self.strategy {
            Strategy::Table(table) => match table[value as usize] {
                u32::MAX => None,
                t => Some(t as u64),
            },
            Strategy::BabyGiant { baby, step, giant } => {
                let mut gamma = value;
                for i in 0..=(self.order / step) {
                    if let Some(&j) = baby.get(&gamma) {
                        let t = i * step + j;
                        if t < self.order {
                            return Some(t);
                        }
                    }
                    gamma = self.field.mul(gamma, *giant);
                }
                None
            }
        }
    }
}

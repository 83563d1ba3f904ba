use std::fmt;

use crate::error::{domain, Result};

/// Square-free monomial `u_I` in the nilpotent variables `u_{qj}`, as a bit set.
///
/// Bit positions are assigned by a [`Levels`] layout.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NilMonomial(pub u128);

impl NilMonomial {
    pub const EMPTY: NilMonomial = NilMonomial(0);

    pub fn bits(self) -> u128 {
        self.0
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> u32 {
        self.0.count_ones()
    }

    pub fn intersects(self, other: NilMonomial) -> bool {
        self.0 & other.0 != 0
    }

    pub fn union(self, other: NilMonomial) -> NilMonomial {
        NilMonomial(self.0 | other.0)
    }

    /// Product `u_I * u_J`, zero when the sets overlap.
    pub fn mul(self, other: NilMonomial) -> Option<NilMonomial> {
        if self.intersects(other) {
            None
        } else {
            Some(self.union(other))
        }
    }

    pub fn is_subset(self, other: NilMonomial) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn iter_bits(self) -> impl Iterator<Item = u32> {
        let mut rest = self.0;
        std::iter::from_fn(move || {
            if rest == 0 {
                None
            } else {
                let b = rest.trailing_zeros();
                rest &= rest - 1;
                Some(b)
            }
        })
    }
}

/// Bit layout of the nilpotent variables: vertex `q` owns levels `1..=caps[q]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Levels {
    caps: Vec<u32>,
    offsets: Vec<u32>,
    owner: Vec<usize>,
}

impl Levels {
    pub fn new(caps: Vec<u32>) -> Result<Self> {
        let mut offsets = Vec::with_capacity(caps.len());
        let mut owner = Vec::new();
        let mut total = 0u32;
        for (q, &k) in caps.iter().enumerate() {
            if k > 32 {
                return domain(format!("at most 32 levels per vertex, got {k}"));
            }
            offsets.push(total);
            total += k;
            owner.extend(std::iter::repeat_n(q, k as usize));
        }
        if total > 128 {
            return domain(format!(
                "{total} nilpotent variables exceed the 128-bit layout"
            ));
        }
        Ok(Levels {
            caps,
            offsets,
            owner,
        })
    }

    pub fn uniform(n: usize, k: u32) -> Result<Self> {
        Levels::new(vec![k; n])
    }

    pub fn n(&self) -> usize {
        self.caps.len()
    }

    pub fn cap(&self, q: usize) -> u32 {
        self.caps[q]
    }

    pub fn caps(&self) -> &[u32] {
        &self.caps
    }

    pub fn total_bits(&self) -> u32 {
        self.owner.len() as u32
    }

    /// Vertex owning a bit position.
    pub fn owner(&self, bit: u32) -> usize {
        self.owner[bit as usize]
    }

    /// Level (1-based) of a bit position.
    pub fn level(&self, bit: u32) -> u32 {
        bit - self.offsets[self.owner(bit)] + 1
    }

    /// `u_{qj}` with `j` 1-based.
    pub fn var(&self, q: usize, j: u32) -> Result<NilMonomial> {
        if j == 0 || j > self.caps[q] {
            return domain(format!(
                "level {j} outside 1..={} at i{}",
                self.caps[q],
                q + 1
            ));
        }
        Ok(NilMonomial(1u128 << (self.offsets[q] + j - 1)))
    }

    /// `u_{q,J}` for `J` given as a mask over levels (bit `j-1` for level `j`).
    pub fn subset(&self, q: usize, levels: u32) -> Result<NilMonomial> {
        let k = self.caps[q];
        if k < 32 && levels >> k != 0 {
            return domain(format!(
                "level mask {levels:#b} exceeds {k} levels at i{}",
                q + 1
            ));
        }
        Ok(NilMonomial((levels as u128) << self.offsets[q]))
    }

    /// Mask over levels of vertex `q` that occur in `nil`.
    pub fn levels_at(&self, nil: NilMonomial, q: usize) -> u32 {
        let k = self.caps[q];
        if k == 0 {
            return 0;
        }
        let mask = if k == 32 { u32::MAX } else { (1u32 << k) - 1 };
        ((nil.0 >> self.offsets[q]) as u32) & mask
    }

    /// Number of levels per vertex occurring in `nil`.
    pub fn row_counts(&self, nil: NilMonomial) -> Vec<i64> {
        let mut rows = vec![0i64; self.n()];
        for b in nil.iter_bits() {
            rows[self.owner(b)] += 1;
        }
        rows
    }

    /// `(vertex, level)` pairs of `nil`, sorted, 0-based vertex and 1-based level.
    pub fn pairs(&self, nil: NilMonomial) -> Vec<(usize, u32)> {
        nil.iter_bits()
            .map(|b| (self.owner(b), self.level(b)))
            .collect()
    }

    /// The monomial using levels `1..=e_q` at every vertex.
    pub fn initial_pattern(&self, e: &[i64]) -> Option<NilMonomial> {
        let mut bits = 0u128;
        for (q, &c) in e.iter().enumerate() {
            if c < 0 || c as u32 > self.caps[q] {
                return None;
            }
            if c > 0 {
                bits |= ((1u128 << c) - 1) << self.offsets[q];
            }
        }
        Some(NilMonomial(bits))
    }

    pub fn display(&self, nil: NilMonomial) -> PairsDisplay<'_> {
        PairsDisplay { levels: self, nil }
    }
}

pub struct PairsDisplay<'a> {
    levels: &'a Levels,
    nil: NilMonomial,
}

impl fmt::Display for PairsDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (k, (q, j)) in self.levels.pairs(self.nil).into_iter().enumerate() {
            if k > 0 {
                f.write_str(",")?;
            }
            write!(f, "({},{})", q + 1, j)?;
        }
        f.write_str("}")
    }
}

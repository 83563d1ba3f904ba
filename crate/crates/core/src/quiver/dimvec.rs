use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};

/// Integer vector indexed by the vertices of a quiver (dense, 0-based).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct DimVec(Vec<i64>);

impl DimVec {
    pub fn zeros(n: usize) -> Self {
        DimVec(vec![0; n])
    }

    pub fn unit(n: usize, v: usize) -> Self {
        let mut d = vec![0; n];
        d[v] = 1;
        DimVec(d)
    }

    pub fn from_entries(entries: Vec<i64>) -> Self {
        DimVec(entries)
    }

    /// Builds a vector from `(vertex, multiplicity)` pairs.
    pub fn from_sparse(n: usize, pairs: &[(usize, i64)]) -> Self {
        let mut d = vec![0; n];
        for &(v, c) in pairs {
            d[v] += c;
        }
        DimVec(d)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn entries(&self) -> &[i64] {
        &self.0
    }

    pub fn get(&self, v: usize) -> i64 {
        self.0[v]
    }

    pub fn set(&mut self, v: usize, value: i64) {
        self.0[v] = value;
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&x| x == 0)
    }

    pub fn is_nonnegative(&self) -> bool {
        self.0.iter().all(|&x| x >= 0)
    }

    pub fn total(&self) -> i64 {
        self.0.iter().sum()
    }

    pub fn support(&self) -> Vec<usize> {
        (0..self.0.len()).filter(|&v| self.0[v] != 0).collect()
    }

    pub fn add(&self, other: &DimVec) -> DimVec {
        DimVec(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &DimVec) -> DimVec {
        DimVec(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    pub fn scale(&self, k: i64) -> DimVec {
        DimVec(self.0.iter().map(|a| a * k).collect())
    }

    /// Componentwise `self <= other`.
    pub fn le(&self, other: &DimVec) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    /// gcd of the entries.
    pub fn index(&self) -> Result<u64> {
        index(&self.0)
    }

    pub fn is_primitive(&self) -> bool {
        self.index().map(|i| i == 1).unwrap_or(false)
    }

    /// Splits `self = n * p` with `p` primitive.
    pub fn primitive_part(&self) -> Result<(DimVec, u64)> {
        let n = self.index()?;
        let p = DimVec(self.0.iter().map(|a| a / n as i64).collect());
        Ok((p, n))
    }
}

impl fmt::Display for DimVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (v, &c) in self.0.iter().enumerate() {
            if c == 0 {
                continue;
            }
            if c < 0 {
                f.write_str("-")?;
            } else if !first {
                f.write_str("+")?;
            }
            if c.abs() != 1 {
                write!(f, "{}", c.abs())?;
            }
            write!(f, "i{}", v + 1)?;
            first = false;
        }
        if first {
            f.write_str("0")?;
        }
        Ok(())
    }
}

/// gcd of an integer vector; the zero vector has no index.
pub fn index(v: &[i64]) -> Result<u64> {
    let g = v.iter().fold(0i64, |g, &x| g.gcd(&x));
    if g == 0 {
        return domain("index of the zero vector");
    }
    Ok(g.unsigned_abs())
}

/// Reduced fraction in `[0, 1]` used to order operators.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Slope {
    num: i64,
    den: i64,
}

impl Slope {
    pub fn new(num: i64, den: i64) -> Result<Self> {
        if den == 0 {
            return domain("slope with zero denominator");
        }
        let g = num.gcd(&den);
        let (mut n, mut d) = (num / g, den / g);
        if d < 0 {
            n = -n;
            d = -d;
        }
        Ok(Slope { num: n, den: d })
    }

    pub fn num(&self) -> i64 {
        self.num
    }

    pub fn den(&self) -> i64 {
        self.den
    }

    pub fn half() -> Self {
        Slope { num: 1, den: 2 }
    }
}

impl Ord for Slope {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.num as i128 * other.den as i128).cmp(&(other.num as i128 * self.den as i128))
    }
}

impl PartialOrd for Slope {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Slope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == 1 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

impl FromStr for Slope {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Format(format!("cannot parse slope {s:?}"));
        match s.split_once('/') {
            Some((a, b)) => {
                let a = a.trim().parse().map_err(|_| bad())?;
                let b = b.trim().parse().map_err(|_| bad())?;
                Slope::new(a, b)
            }
            None => Slope::new(s.trim().parse().map_err(|_| bad())?, 1),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn index_examples() {
        assert_eq!(index(&[2, 4]).unwrap(), 2);
        assert_eq!(index(&[2, 3]).unwrap(), 1);
        assert_eq!(index(&[0, -6, 9]).unwrap(), 3);
        assert!(index(&[0, 0]).is_err());
    }

    #[test]
    fn display_sparse() {
        let d = DimVec::from_entries(vec![1, 0, 2, -1]);
        assert_eq!(d.to_string(), "i1+2i3-i4");
        assert_eq!(DimVec::zeros(3).to_string(), "0");
    }

    #[test]
    fn slope_order_and_parse() {
        let a: Slope = "2/5".parse().unwrap();
        let b = Slope::new(4, 10).unwrap();
        assert_eq!(a, b);
        assert!(Slope::new(1, 3).unwrap() < Slope::half());
        assert_eq!("1".parse::<Slope>().unwrap().to_string(), "1");
        assert!("x/2".parse::<Slope>().is_err());
    }
}

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::extraction::Field;
use crate::num::Real;

/// Per-field weights in [0, 1], not all zero, in [`Field::ALL`] order.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct WeightVector<T> {
    w: [T; 5],
}

impl<T: Real> WeightVector<T> {
    pub fn new(w: [T; 5]) -> Result<Self> {
        if let Some(bad) = w.iter().find(|x| !(**x >= T::zero() && **x <= T::one())) {
            return Err(Error::InvalidWeights(format!("weight {bad} outside [0, 1]")));
        }
        if w.iter().all(|x| *x == T::zero()) {
            return Err(Error::InvalidWeights("all weights are zero".into()));
        }
        Ok(WeightVector { w })
    }

    /// The optimum reported for the original corpus:
    /// keywords 0.1, concepts 0.3, expansions 0.2, relations 1.0, measure relations 0.3.
    pub fn published() -> Self {
        let w = [0.1, 0.3, 0.2, 1.0, 0.3].map(T::from_f64_lossy);
        WeightVector { w }
    }

    /// All weight on one field.
    pub fn indicator(field: Field) -> Self {
        let mut w = [T::zero(); 5];
        w[field.index()] = T::one();
        WeightVector { w }
    }

    /// Grid point `i / 10` per field, `steps` in `0..=10`.
    pub fn from_steps(steps: [u8; 5]) -> Result<Self> {
        Self::new(steps.map(|s| T::from_count(s as usize) / T::from_count(10)))
    }

    pub fn get(&self, field: Field) -> T {
        self.w[field.index()]
    }

    pub fn as_array(&self) -> [T; 5] {
        self.w
    }

    /// Uniformly scaled copy; fails if a weight leaves [0, 1].
    pub fn scaled(&self, c: T) -> Result<Self> {
        Self::new(self.w.map(|x| x * c))
    }

    pub fn cast<U: Real>(&self) -> WeightVector<U> {
        WeightVector {
            w: self.w.map(|x| U::from_f64_lossy(x.as_f64())),
        }
    }
}

impl<T: Real> Default for WeightVector<T> {
    fn default() -> Self {
        Self::published()
    }
}

impl<T: Real> fmt::Display for WeightVector<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.w.iter().map(|x| x.to_string()).collect();
        f.write_str(&parts.join(","))
    }
}

/// `w1,w2,w3,w4,w5`
impl<T: Real> FromStr for WeightVector<T> {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(',').map(str::trim).collect();
        if parts.len() != 5 {
            return Err(Error::InvalidWeights(format!(
                "expected 5 comma-separated weights, got `{s}`"
            )));
        }
        let mut w = [T::zero(); 5];
        for (slot, part) in w.iter_mut().zip(&parts) {
            *slot = part
                .parse()
                .map_err(|_| Error::InvalidWeights(format!("`{part}` is not a number")))?;
        }
        Self::new(w)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn published_default() {
        let w = WeightVector::<f64>::default();
        assert_eq!(w.as_array(), [0.1, 0.3, 0.2, 1.0, 0.3]);
        assert_eq!(w.get(Field::Relations), 1.0);
        assert_eq!("0.1,0.3,0.2,1,0.3".parse::<WeightVector<f64>>().unwrap(), w);
    }

    #[test]
    fn invalid_vectors() {
        assert!(WeightVector::new([0.0f64; 5]).is_err());
        assert!(WeightVector::new([1.5f64, 0.0, 0.0, 0.0, 0.0]).is_err());
        assert!(WeightVector::new([f64::NAN, 1.0, 0.0, 0.0, 0.0]).is_err());
        assert!("1,2".parse::<WeightVector<f32>>().is_err());
        assert!("a,0,0,0,1".parse::<WeightVector<f32>>().is_err());
        assert!(WeightVector::<f64>::from_steps([0; 5]).is_err());
    }

    #[test]
    fn grid_steps_are_tenths() {
        let w = WeightVector::<f64>::from_steps([1, 3, 2, 10, 3]).unwrap();
        assert_eq!(w, WeightVector::published());
        assert_eq!(w.to_string(), "0.1,0.3,0.2,1,0.3");
    }
}

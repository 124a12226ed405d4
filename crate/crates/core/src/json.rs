//! Serde helpers: complex numbers travel as `[re, im]` pairs.

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::scalar::{CMat, CVec, Real, C};

pub fn to_pairs<T: Real>(it: impl Iterator<Item = C<T>>) -> Vec<[T; 2]> {
    it.map(|z| [z.re, z.im]).collect()
}

pub fn from_pairs<T: Real>(pairs: &[[T; 2]]) -> Vec<C<T>> {
    pairs.iter().map(|p| C::new(p[0], p[1])).collect()
}

/// Row-major nested rows of `[re, im]` pairs.
pub fn matrix_rows<T: Real>(m: &CMat<T>) -> Vec<Vec<[T; 2]>> {
    m.row_iter().map(|r| to_pairs(r.iter().copied())).collect()
}

pub mod cvec {
    use super::*;

    pub fn serialize<T: Real, S: Serializer>(v: &CVec<T>, s: S) -> Result<S::Ok, S::Error> {
        to_pairs(v.iter().copied()).serialize(s)
    }

    pub fn deserialize<'de, T: Real, D: Deserializer<'de>>(d: D) -> Result<CVec<T>, D::Error> {
        let pairs: Vec<[T; 2]> = Vec::deserialize(d)?;
        Ok(CVec::from_vec(from_pairs(&pairs)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rows_are_row_major() {
        let m = CMat::<f64>::from_row_slice(2, 2, &[C::new(1.0, 0.0), C::new(2.0, 1.0), C::new(3.0, 0.0), C::new(4.0, -1.0)]);
        let rows = matrix_rows(&m);
        assert_eq!(rows[0], vec![[1.0, 0.0], [2.0, 1.0]]);
        assert_eq!(rows[1], vec![[3.0, 0.0], [4.0, -1.0]]);
    }
}

//! Serialization helpers shared by every JSON report.

use serde::Serializer;

/// Version tag carried by every JSON document the crate emits.
pub const SCHEMA_VERSION: u32 = 1;

/// Rounds to 12 significant digits. Non-finite values and zero pass through.
pub fn round_sig(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{x:.11e}").parse().unwrap_or(x)
}

pub fn round12<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_f64(round_sig(*x))
}

pub fn round12_opt<S: Serializer>(x: &Option<f64>, s: S) -> Result<S::Ok, S::Error> {
    match x {
        Some(v) => s.serialize_some(&round_sig(*v)),
        None => s.serialize_none(),
    }
}

pub fn round12_pairs<S: Serializer>(xs: &[(usize, f64)], s: S) -> Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(xs.len()))?;
    for &(node, v) in xs {
        seq.serialize_element(&(node, round_sig(v)))?;
    }
    seq.end()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rounds_to_twelve_digits() {
        assert_eq!(round_sig(10.0 / 3.0), 3.33333333333);
        assert_eq!(round_sig(-2.0), -2.0);
        assert_eq!(round_sig(1.0 / 7.0 * 1e-20), 1.42857142857e-21);
        assert!(round_sig(f64::NAN).is_nan());
    }
}

//! Deterministic text output: number formatting and config-hash headers.

use sha2::{Digest, Sha256};

/// 17 significant digits in scientific notation; round-trips every f64.
pub fn fmt_num(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.into()
    } else {
        format!("{x:.16e}")
    }
}

/// Hex SHA-256 of a resolved config document.
pub fn config_hash(resolved: &str) -> String {
    let digest = Sha256::digest(resolved.as_bytes());
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

/// Comment line placed at the top of every output file.
pub fn header_line(hash: &str, baseline: impl std::fmt::Display) -> String {
    format!("# config_sha256={hash} baseline={baseline}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_digits_round_trip() {
        for x in [0.1, -1.0 / 3.0, 6.02214076e23, 5e-324, 0.0] {
            let s = fmt_num(x);
            assert_eq!(s.parse::<f64>().unwrap(), x, "{s}");
        }
        assert_eq!(fmt_num(1.5), "1.5000000000000000e0");
    }

    #[test]
    fn hash_is_stable() {
        assert_eq!(config_hash("a"), config_hash("a"));
        assert_ne!(config_hash("a"), config_hash("b"));
        assert_eq!(config_hash("").len(), 64);
    }
}

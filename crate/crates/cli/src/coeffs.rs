//! Parsing of complex coefficient lists passed via `--coeffs`.
//!
//! Each entry is `re` or `re+imi` (also `re-imi` or a pure `imi`), and the
//! list reads α₁, β₁, α₂, β₂, … Normalization of each pair is checked, not
//! silently fixed.

use ghz_core::{Complex64, ProductSpinSpec};

pub fn parse_complex(token: &str) -> Result<Complex64, String> {
    let s = token.trim();
    if s.is_empty() {
        return Err("empty coefficient".into());
    }
    if let Some(body) = s.strip_suffix(['i', 'I']) {
        // find the split between the real and imaginary parts, skipping a
        // leading sign and exponent signs
        let split = body
            .char_indices()
            .skip(1)
            .filter(|&(k, c)| {
                (c == '+' || c == '-') && !matches!(&body[..k].chars().last(), Some('e' | 'E'))
            })
            .map(|(k, _)| k)
            .last();
        let (re_part, im_part) = match split {
            Some(k) => (&body[..k], &body[k..]),
            None => ("0", body),
        };
        let re: f64 = re_part
            .parse()
            .map_err(|_| format!("cannot parse `{token}` as a complex number"))?;
        let im: f64 = match im_part {
            "+" | "" => 1.0,
            "-" => -1.0,
            _ => im_part
                .parse()
                .map_err(|_| format!("cannot parse `{token}` as a complex number"))?,
        };
        return Ok(Complex64::new(re, im));
    }
    let re: f64 = s
        .parse()
        .map_err(|_| format!("cannot parse `{token}` as a number"))?;
    Ok(Complex64::new(re, 0.0))
}

pub fn parse_spec(tokens: &[String]) -> Result<ProductSpinSpec, String> {
    if tokens.len() < 2 || !tokens.len().is_multiple_of(2) {
        return Err(format!(
            "--coeffs needs an even number of values (α,β per spin), got {}",
            tokens.len()
        ));
    }
    let values: Vec<Complex64> = tokens
        .iter()
        .map(|t| parse_complex(t))
        .collect::<Result<_, _>>()?;
    let pairs: Vec<(Complex64, Complex64)> =
        values.chunks(2).map(|c| (c[0], c[1])).collect();
    ProductSpinSpec::new(pairs).map_err(|e| e.to_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_reals_and_complexes() {
        assert_eq!(parse_complex("0.5").unwrap(), Complex64::new(0.5, 0.0));
        assert_eq!(parse_complex("-1").unwrap(), Complex64::new(-1.0, 0.0));
        assert_eq!(
            parse_complex("0.5+0.5i").unwrap(),
            Complex64::new(0.5, 0.5)
        );
        assert_eq!(
            parse_complex("0.5-0.5i").unwrap(),
            Complex64::new(0.5, -0.5)
        );
        assert_eq!(parse_complex("0.7i").unwrap(), Complex64::new(0.0, 0.7));
        assert_eq!(parse_complex("-0.7i").unwrap(), Complex64::new(0.0, -0.7));
        assert_eq!(parse_complex("1e-1").unwrap(), Complex64::new(0.1, 0.0));
        assert_eq!(
            parse_complex("1e-1+2e-1i").unwrap(),
            Complex64::new(0.1, 0.2)
        );
        assert!(parse_complex("abc").is_err());
        assert!(parse_complex("").is_err());
    }

    #[test]
    fn spec_validation() {
        let ok: Vec<String> = ["0.7071067811865476", "0.7071067811865476"]
            .iter()
            .map(|s| s.to_string())
            .collect();
        assert!(parse_spec(&ok).is_ok());

        let odd: Vec<String> = vec!["1".into()];
        assert!(parse_spec(&odd).is_err());

        let unnormalized: Vec<String> = vec!["1".into(), "1".into()];
        let err = parse_spec(&unnormalized).unwrap_err();
        assert!(err.contains("not normalized"));
    }
}

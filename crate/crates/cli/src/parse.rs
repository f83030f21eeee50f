//! Text forms of complex numbers, ranges and cuts.

use num_complex::Complex64 as C64;

/// Parses `re`, `imj`, `re+imj` or `re-imj` (`i` is accepted for `j`).
pub fn complex(text: &str) -> Result<C64, String> {
    let t: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    let bad = || format!("cannot parse complex number `{text}`");
    if t.is_empty() {
        return Err(bad());
    }
    let Some(body) = t.strip_suffix('j').or_else(|| t.strip_suffix('i')) else {
        return t.parse::<f64>().map(|re| C64::new(re, 0.0)).map_err(|_| bad());
    };
    // split at the last sign that is not a leading sign or an exponent sign
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let imag = |s: &str| -> Result<f64, String> {
        match s {
            "" | "+" => Ok(1.0),
            "-" => Ok(-1.0),
            _ => s.parse::<f64>().map_err(|_| bad()),
        }
    };
    match split {
        Some(k) => {
            let re = body[..k].parse::<f64>().map_err(|_| bad())?;
            Ok(C64::new(re, imag(&body[k..])?))
        }
        None => Ok(C64::new(0.0, imag(body)?)),
    }
}

/// `start:stop:count`, inclusive of both ends.
pub fn range(text: &str) -> Result<Vec<f64>, String> {
    let bad = || format!("range `{text}` is not start:stop:count");
    let parts: Vec<&str> = text.split(':').collect();
    if parts.len() != 3 {
        return Err(bad());
    }
    let start: f64 = parts[0].parse().map_err(|_| bad())?;
    let stop: f64 = parts[1].parse().map_err(|_| bad())?;
    let count: usize = parts[2].parse().map_err(|_| bad())?;
    if count == 0 || !start.is_finite() || !stop.is_finite() {
        return Err(format!("range `{text}` is empty or not finite"));
    }
    if count == 1 {
        return Ok(vec![start]);
    }
    Ok((0..count)
        .map(|k| if k + 1 == count { stop } else { start + (stop - start) * k as f64 / (count - 1) as f64 })
        .collect())
}

/// Comma-separated one-based mode numbers, returned zero-based.
pub fn cut(text: &str) -> Result<Vec<usize>, String> {
    text.split(',')
        .map(|s| match s.trim().parse::<usize>() {
            Ok(k) if k >= 1 => Ok(k - 1),
            _ => Err(format!("cut `{text}` must list mode numbers starting at 1")),
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_forms() {
        let cases = [
            ("1", C64::new(1.0, 0.0)),
            ("-1", C64::new(-1.0, 0.0)),
            ("0.5j", C64::new(0.0, 0.5)),
            ("-j", C64::new(0.0, -1.0)),
            ("1+2j", C64::new(1.0, 2.0)),
            ("1-2j", C64::new(1.0, -2.0)),
            ("-0.3-0.4i", C64::new(-0.3, -0.4)),
            ("1e-3+2e-2j", C64::new(1e-3, 2e-2)),
            ("-1E+1-1e-1j", C64::new(-10.0, -0.1)),
            ("2.5e-3j", C64::new(0.0, 2.5e-3)),
        ];
        for (text, want) in cases {
            assert_eq!(complex(text).unwrap(), want, "{text}");
        }
        for text in ["", "abc", "1+", "1+2", "j2"] {
            assert!(complex(text).is_err(), "{text}");
        }
    }

    #[test]
    fn ranges() {
        assert_eq!(range("0:1:3").unwrap(), vec![0.0, 0.5, 1.0]);
        assert_eq!(range("0.001:3:50").unwrap().last(), Some(&3.0));
        assert_eq!(range("2:2:1").unwrap(), vec![2.0]);
        assert!(range("0:1:0").is_err());
        assert!(range("0:1").is_err());
    }

    #[test]
    fn cuts() {
        assert_eq!(cut("1").unwrap(), vec![0]);
        assert_eq!(cut("1, 3").unwrap(), vec![0, 2]);
        assert!(cut("0").is_err());
        assert!(cut("a").is_err());
    }
}

//! Grid syntax for sweep parameters.
//!
//! A grid is a comma-separated list of items. Each item is a number, an
//! arithmetic range `a:b:step` (or `a:b`, step 1), or a geometric range
//! `a:b:xr`. The upper end `b` is always part of the grid, so
//! `0.5:0.99:0.05` yields `0.50, 0.55, ..., 0.95, 0.99`.

use super::HarnessError;

/// Arithmetic grid points are rounded to this many decimals so that
/// `0.5 + 2 * 0.05` prints as `0.6`.
const DECIMALS: f64 = 1e12;

fn usage(msg: String) -> HarnessError {
    HarnessError::Usage(msg)
}

fn number(s: &str) -> Result<f64, HarnessError> {
    let v: f64 = s.trim().parse().map_err(|_| usage(format!("`{s}` is not a number")))?;
    if !v.is_finite() {
        return Err(usage(format!("`{s}` is not finite")));
    }
    Ok(v)
}

fn push_unique(out: &mut Vec<f64>, v: f64) {
    if !out.iter().any(|x| (x - v).abs() <= 1e-12 * v.abs().max(1.0)) {
        out.push(v);
    }
}

fn expand_item(item: &str, out: &mut Vec<f64>) -> Result<(), HarnessError> {
    let parts: Vec<&str> = item.split(':').collect();
    match parts.as_slice() {
        [single] => push_unique(out, number(single)?),
        [a, b] | [a, b, _] => {
            let (a, b) = (number(a)?, number(b)?);
            if a > b {
                return Err(usage(format!("range `{item}` runs backwards")));
            }
            let step = parts.get(2).map(|s| s.trim()).unwrap_or("1");
            if let Some(ratio) = step.strip_prefix('x') {
                let r = number(ratio)?;
                if r <= 1.0 || a <= 0.0 {
                    return Err(usage(format!("geometric range `{item}` needs ratio > 1 and a > 0")));
                }
                let mut v = a;
                while v <= b * (1.0 + 1e-12) {
                    push_unique(out, v);
                    v *= r;
                }
            } else {
                let h = number(step)?;
                if h <= 0.0 {
                    return Err(usage(format!("range `{item}` needs a positive step")));
                }
                let mut i = 0u64;
                loop {
                    let v = ((a + i as f64 * h) * DECIMALS).round() / DECIMALS;
                    if v > b + 1e-9 * h {
                        break;
                    }
                    push_unique(out, v);
                    i += 1;
                    if i > 10_000_000 {
                        return Err(usage(format!("range `{item}` is too long")));
                    }
                }
            }
            push_unique(out, b);
        }
        _ => return Err(usage(format!("cannot parse grid item `{item}`"))),
    }
    Ok(())
}

/// Parses a real-valued grid, keeping first-occurrence order.
pub fn parse_real_grid(spec: &str) -> Result<Vec<f64>, HarnessError> {
    let mut out = Vec::new();
    for item in spec.split(',') {
        if item.trim().is_empty() {
            return Err(usage(format!("empty item in grid `{spec}`")));
        }
        expand_item(item, &mut out)?;
    }
    Ok(out)
}

/// Parses a grid of positive integers.
pub fn parse_int_grid(spec: &str) -> Result<Vec<u64>, HarnessError> {
    parse_real_grid(spec)?
        .into_iter()
        .map(|v| {
            if v >= 1.0 && v.fract() == 0.0 && v < 9.0e15 {
                Ok(v as u64)
            } else {
                Err(usage(format!(
                    "grid `{spec}` contains {v}, expected a positive integer"
                )))
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_p_grid() {
        let g = parse_real_grid("0.5:0.99:0.05").unwrap();
        let expect = [0.5, 0.55, 0.6, 0.65, 0.7, 0.75, 0.8, 0.85, 0.9, 0.95, 0.99];
        assert_eq!(g, expect);
    }

    #[test]
    fn exact_endpoint_not_duplicated() {
        assert_eq!(parse_real_grid("0.5:1:0.25").unwrap(), [0.5, 0.75, 1.0]);
    }

    #[test]
    fn geometric() {
        let g = parse_int_grid("2:16384:x2").unwrap();
        assert_eq!(g.len(), 14);
        assert_eq!(g[0], 2);
        assert_eq!(g[13], 16384);
        assert_eq!(parse_int_grid("1:10:x3").unwrap(), [1, 3, 9, 10]);
    }

    #[test]
    fn lists_and_singletons() {
        assert_eq!(parse_real_grid("0.5,0.75, 0.9").unwrap(), [0.5, 0.75, 0.9]);
        assert_eq!(parse_int_grid("7").unwrap(), [7]);
        assert_eq!(parse_int_grid("2:5").unwrap(), [2, 3, 4, 5]);
    }

    #[test]
    fn errors() {
        for bad in ["", "a", "1:0", "0.5:1:0", "0.5:1:-1", "1:4:x1", "1,,2", "1:2:3:4"] {
            assert!(parse_real_grid(bad).is_err(), "{bad}");
        }
        assert!(parse_int_grid("0.5:1:0.25").is_err());
        assert!(parse_int_grid("0").is_err());
    }
}

//! Exact rational helpers: decimal parsing and fixed-place rendering.

use num_rational::Ratio;

pub type Exact = Ratio<u64>;

/// Rounds a non-negative rational to the nearest integer, halves up.
pub fn round_half_up(value: Exact) -> u64 {
    let twice = value * Ratio::from_integer(2) + Ratio::from_integer(1);
    (twice / Ratio::from_integer(2)).floor().to_integer()
}

/// Renders `value` with exactly `places` decimals, rounding halves up.
pub fn format_decimal(value: Exact, places: u32) -> String {
    let scale = 10u64.pow(places);
    let scaled = round_half_up(value * Ratio::from_integer(scale));
    if places == 0 {
        return scaled.to_string();
    }
    format!(
        "{}.{:0width$}",
        scaled / scale,
        scaled % scale,
        width = places as usize
    )
}

/// Parses a plain non-negative decimal such as `0.35`, `12` or `.5` exactly.
pub fn parse_decimal(text: &str) -> Option<Exact> {
    let text = text.trim();
    let (whole, frac) = match text.split_once('.') {
        Some((w, f)) => (w, f),
        None => (text, ""),
    };
    if whole.is_empty() && frac.is_empty() {
        return None;
    }
    if !whole
        .chars()
        .chain(frac.chars())
        .all(|c| c.is_ascii_digit())
        || frac.len() > 18
    {
        return None;
    }
    let whole: u64 = if whole.is_empty() {
        0
    } else {
        whole.parse().ok()?
    };
    let denom = 10u64.pow(frac.len() as u32);
    let frac: u64 = if frac.is_empty() {
        0
    } else {
        frac.parse().ok()?
    };
    Some(Ratio::from_integer(whole) + Ratio::new(frac, denom))
}

/// Parses `a/b` or a decimal.
pub fn parse_ratio(text: &str) -> Option<Exact> {
    match text.split_once('/') {
        Some((n, d)) => {
            let n: u64 = n.trim().parse().ok()?;
            let d: u64 = d.trim().parse().ok()?;
            (d != 0).then(|| Ratio::new(n, d))
        }
        None => parse_decimal(text),
    }
}

pub fn to_f64(value: Exact) -> f64 {
    *value.numer() as f64 / *value.denom() as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rounding_and_rendering() {
        assert_eq!(round_half_up(Ratio::new(156, 10)), 16);
        assert_eq!(round_half_up(Ratio::new(15, 2)), 8);
        assert_eq!(round_half_up(Ratio::new(945, 100)), 9);
        assert_eq!(format_decimal(Ratio::new(3, 74), 6), "0.040541");
        assert_eq!(format_decimal(Ratio::new(1, 8), 2), "0.13");
        assert_eq!(format_decimal(Ratio::from_integer(7), 2), "7.00");
        assert_eq!(format_decimal(Ratio::new(2, 3), 0), "1");
    }

    #[test]
    fn decimal_parsing() {
        assert_eq!(parse_decimal("0.35"), Some(Ratio::new(7, 20)));
        assert_eq!(parse_decimal(".5"), Some(Ratio::new(1, 2)));
        assert_eq!(parse_decimal("12"), Some(Ratio::from_integer(12)));
        assert_eq!(parse_decimal("1e-3"), None);
        assert_eq!(parse_decimal("-1"), None);
        assert_eq!(parse_decimal("."), None);
        assert_eq!(parse_ratio("25/68"), Some(Ratio::new(25, 68)));
        assert_eq!(parse_ratio("1/0"), None);
    }
}

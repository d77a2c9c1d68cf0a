//! Numeric arguments: plain floats, `p/q`, `sqrt(x)` and nestings thereof,
//! e.g. `-sqrt(2)/3` or `sqrt(0.27)`.

pub fn parse_number(s: &str) -> Result<f64, String> {
    let value = eval(s.trim()).ok_or_else(|| format!("cannot read `{s}` as a number"))?;
    if value.is_finite() {
        Ok(value)
    } else {
        Err(format!("`{s}` is not finite"))
    }
}

fn eval(s: &str) -> Option<f64> {
    let s = s.trim();
    if let Some(rest) = s.strip_prefix('-') {
        return eval(rest).map(|x| -x);
    }
    if let Some(i) = top_level_slash(s) {
        return Some(eval(&s[..i])? / eval(&s[i + 1..])?);
    }
    if let Some(inner) = s.strip_prefix("sqrt(").and_then(|r| r.strip_suffix(')')) {
        let x = eval(inner)?;
        return (x >= 0.0).then(|| x.sqrt());
    }
    if let Some(inner) = s.strip_prefix('(').and_then(|r| r.strip_suffix(')')) {
        return eval(inner);
    }
    s.parse().ok()
}

/// Last `/` outside parentheses, so `a/b/c` reads as `(a/b)/c`.
fn top_level_slash(s: &str) -> Option<usize> {
    let mut depth = 0i32;
    let mut found = None;
    for (i, ch) in s.char_indices() {
        match ch {
            '(' => depth += 1,
            ')' => depth -= 1,
            '/' if depth == 0 => found = Some(i),
            _ => {}
        }
    }
    found
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn forms() {
        assert_eq!(parse_number("0.5").unwrap(), 0.5);
        assert_eq!(parse_number("2/3").unwrap(), 2.0 / 3.0);
        assert_eq!(parse_number("sqrt(2)").unwrap(), 2f64.sqrt());
        assert_eq!(parse_number("-sqrt(2)/3").unwrap(), -(2f64.sqrt()) / 3.0);
        assert_eq!(parse_number("sqrt(1/3)").unwrap(), (1.0f64 / 3.0).sqrt());
        assert_eq!(parse_number("1/2/2").unwrap(), 0.25);
        assert_eq!(parse_number("1e-3").unwrap(), 1e-3);
        assert!(parse_number("sqrt(-1)").is_err());
        assert!(parse_number("1/0").is_err());
        assert!(parse_number("abc").is_err());
    }
}

//! Numeric tokens accepted on the command line: plain literals and short
//! products/quotients with `pi` (and `h`, Planck's constant, where allowed),
//! e.g. `pi/2`, `3*pi/4`, `-pi`, `h/4`.

use std::f64::consts::PI;

/// Parse a real-valued token. `h` is accepted only when `planck` is given.
pub fn parse_real_with(token: &str, planck: Option<f64>) -> Result<f64, String> {
    let text = token.trim();
    if text.is_empty() {
        return Err("empty number".into());
    }
    if let Ok(v) = text.parse::<f64>() {
        return finite(v, token);
    }
    let (negative, body) = match text.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, text.strip_prefix('+').unwrap_or(text)),
    };

    let mut value = 1.0;
    let mut op = '*';
    let mut term = String::new();
    let mut apply = |op: char, term: &str| -> Result<(), String> {
        let factor = match term.trim() {
            "pi" | "π" => PI,
            "h" => planck.ok_or_else(|| format!("'h' is not allowed in '{token}'"))?,
            t => t
                .parse::<f64>()
                .map_err(|_| format!("cannot parse '{token}' as a number"))?,
        };
        match op {
            '*' => value *= factor,
            _ => value /= factor,
        }
        Ok(())
    };
    for c in body.chars() {
        if c == '*' || c == '/' {
            apply(op, &term)?;
            term.clear();
            op = c;
        } else {
            term.push(c);
        }
    }
    apply(op, &term)?;
    finite(if negative { -value } else { value }, token)
}

fn finite(v: f64, token: &str) -> Result<f64, String> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format!("'{token}' is not a finite number"))
    }
}

pub fn parse_real(token: &str) -> Result<f64, String> {
    parse_real_with(token, None)
}

/// Comma-separated list of reals.
pub fn parse_list(token: &str) -> Result<Vec<f64>, String> {
    token.split(',').map(parse_real).collect()
}

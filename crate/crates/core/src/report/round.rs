use crate::error::{Error, Result};

/// Digits after the point needed to print any finite `f64` exactly.
const EXACT_DIGITS: usize = 1100;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Rounding {
    /// Ties go away from zero, judged on the exact binary value.
    #[default]
    HalfUp,
}

/// Formats `value` with `decimals` fractional digits using half-up rounding
/// of its exact decimal expansion. Negative zero prints without a sign, and
/// the output never uses exponent notation.
pub fn round_display(value: f64, decimals: u32, rounding: Rounding) -> Result<String> {
    let Rounding::HalfUp = rounding;
    if !value.is_finite() {
        return Err(Error::Format(format!("cannot display non-finite value {value}")));
    }
    let decimals = decimals as usize;
    let exact = format!("{:.*}", EXACT_DIGITS, value.abs());
    let (int_part, frac_part) = exact.split_once('.').expect("fixed-point output has a point");

    let mut digits: Vec<u8> = int_part
        .bytes()
        .chain(frac_part.bytes().take(decimals))
        .map(|b| b - b'0')
        .collect();
    let round_up = frac_part.as_bytes()[decimals] >= b'5';
    if round_up {
        let mut i = digits.len();
        loop {
            if i == 0 {
                digits.insert(0, 1);
                break;
            }
            i -= 1;
            if digits[i] == 9 {
                digits[i] = 0;
            } else {
                digits[i] += 1;
                break;
            }
        }
    }

    let int_len = digits.len() - decimals;
    let mut out = String::with_capacity(digits.len() + 2);
    if value.is_sign_negative() && digits.iter().any(|&d| d != 0) {
        out.push('-');
    }
    out.extend(digits[..int_len].iter().map(|d| char::from(b'0' + d)));
    if decimals > 0 {
        out.push('.');
        out.extend(digits[int_len..].iter().map(|d| char::from(b'0' + d)));
    }
    Ok(out)
}

/// [`round_display`] parsed back into a number.
pub fn round_half_up(value: f64, decimals: u32) -> Result<f64> {
    let text = round_display(value, decimals, Rounding::HalfUp)?;
    Ok(text.parse().expect("rounded display parses"))
}

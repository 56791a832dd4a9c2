//! Exact rational helpers on top of [`num_rational::Ratio`].

use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{Signed, ToPrimitive};

/// Exact rational number used for sparsities, qualities and fractional weights.
pub type Rational = Ratio<i128>;

/// Builds `num / den`.
pub fn rat(num: i128, den: i128) -> Rational {
    Rational::new(num, den)
}

/// Integer as a rational.
pub fn int(v: i128) -> Rational {
    Rational::from_integer(v)
}

/// Least common multiple of the denominators of `values` (1 for an empty input).
pub fn common_denominator<'a>(values: impl IntoIterator<Item = &'a Rational>) -> i128 {
    values.into_iter().fold(1i128, |acc, r| acc.lcm(r.denom()))
}

/// Smallest rational with denominator `den` that is `>= x`.
pub fn from_f64_ceil(x: f64, den: i128) -> Rational {
    rat((x * den as f64).ceil() as i128, den)
}

/// Largest rational with denominator `den` that is `<= x`.
pub fn from_f64_floor(x: f64, den: i128) -> Rational {
    rat((x * den as f64).floor() as i128, den)
}

pub fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// Scales `r` by `den` and returns the integer result; `den` must clear the denominator.
pub(crate) fn scaled(r: &Rational, den: i128) -> i128 {
    let s = r * int(den);
    debug_assert!(s.is_integer(), "denominator {den} does not clear {r}");
    s.to_integer()
}

pub(crate) fn is_nonneg(r: &Rational) -> bool {
    !r.is_negative()
}


/// `log2(x)` rounded up, with `ceil_log2(0) = ceil_log2(1) = 0`.
pub fn ceil_log2(x: u128) -> u32 {
    if x <= 1 { 0 } else { 128 - (x - 1).leading_zeros() }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ceil_log2_small_values() {
        assert_eq!(ceil_log2(1), 0);
        assert_eq!(ceil_log2(2), 1);
        assert_eq!(ceil_log2(3), 2);
        assert_eq!(ceil_log2(4), 2);
        assert_eq!(ceil_log2(5), 3);
        assert_eq!(ceil_log2(1024), 10);
    }

    #[test]
    fn float_roundings_bracket_the_value() {
        let x = std::f64::consts::E;
        assert!(to_f64(&from_f64_floor(x, 1 << 20)) <= x);
        assert!(to_f64(&from_f64_ceil(x, 1 << 20)) >= x);
    }

    #[test]
    fn common_denominator_of_mixed_values() {
        let v = [rat(1, 2), rat(2, 3), int(5)];
        assert_eq!(common_denominator(v.iter()), 6);
    }
}

//! Small numeric helpers shared by the diagnostics.

/// Neumaier's variant of Kahan compensated summation.
///
/// Adding an exact zero leaves the state bit-for-bit unchanged, which the
/// noiseless curves rely on.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct CompensatedSum {
    sum: f64,
    compensation: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.compensation += (self.sum - t) + x;
        } else {
            self.compensation += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.compensation
    }
}

impl Extend<f64> for CompensatedSum {
    fn extend<I: IntoIterator<Item = f64>>(&mut self, iter: I) {
        for x in iter {
            self.add(x);
        }
    }
}

impl FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = CompensatedSum::new();
        acc.extend(iter);
        acc
    }
}

/// Compensated sum of an iterator of values.
pub fn sum(values: impl IntoIterator<Item = f64>) -> f64 {
    values.into_iter().collect::<CompensatedSum>().value()
}

/// Formats `x` with 17 significant digits, enough to round-trip any `f64`.
///
/// Positional notation is used for moderate magnitudes and scientific
/// notation otherwise.
pub fn fmt_sig17(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let exponent = x.abs().log10().floor() as i32;
    if (-6..=16).contains(&exponent) {
        let decimals = (16 - exponent).max(0) as usize;
        let s = format!("{:.*}", decimals, x);
        // log10 can be off by one right at powers of ten
        let digits = s.bytes().filter(u8::is_ascii_digit).count();
        let leading = s
            .bytes()
            .filter(|b| b.is_ascii_digit())
            .take_while(|&b| b == b'0')
            .count();
        if digits - leading > 17 && decimals > 0 {
            format!("{:.*}", decimals - 1, x)
        } else {
            s
        }
    } else {
        format!("{:.16e}", x)
    }
}

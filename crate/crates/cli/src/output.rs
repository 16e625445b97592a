use std::f64::consts::LN_2;

use macjscc::ExtReal;

/// Display unit for exponents.
#[derive(Debug, Clone, Copy)]
pub struct Unit {
    pub bits: bool,
}

impl Unit {
    pub fn name(self) -> &'static str {
        if self.bits {
            "bits"
        } else {
            "nats"
        }
    }

    pub fn scale(self, v: f64) -> f64 {
        if self.bits {
            v / LN_2
        } else {
            v
        }
    }

    pub fn fixed(self, v: ExtReal, decimals: usize) -> String {
        match v {
            ExtReal::Finite(x) => format!("{:.*}", decimals, self.scale(x)),
            other => other.to_string(),
        }
    }
}

/// Nine significant digits; positional unless the magnitude is below 1e-4.
pub fn sig9(v: ExtReal) -> String {
    match v {
        ExtReal::Finite(0.0) => "0".to_string(),
        ExtReal::Finite(x) if x.abs() < 1e-4 => format!("{x:.8e}"),
        ExtReal::Finite(x) => {
            let magnitude = x.abs().log10().floor() as i32;
            let decimals = (8 - magnitude).max(0) as usize;
            format!("{:.*}", decimals, x)
        }
        other => other.to_string(),
    }
}

/// CSV field, quoted when it contains a separator.
pub fn csv_field(s: &str) -> String {
    if s.contains(',') {
        format!("\"{s}\"")
    } else {
        s.to_string()
    }
}

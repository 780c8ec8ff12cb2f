//! Unit handling. Durations are stored in seconds, lengths in micrometers and
//! accelerations in micrometers per microsecond squared.

use std::fmt;
use std::str::FromStr;

use serde::{de, Deserialize, Deserializer, Serialize, Serializer};

/// A duration in seconds.
///
/// Configuration files may write a bare number (seconds) or a string with a
/// unit suffix: `"0.86us"`, `"2.677ms"`, `"4.96days"`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Default)]
pub struct Seconds(pub f64);

impl Seconds {
    pub const ZERO: Seconds = Seconds(0.0);

    pub fn from_micros(us: f64) -> Self {
        Seconds(us * 1e-6)
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn as_micros(self) -> f64 {
        self.0 * 1e6
    }
}

impl fmt::Display for Seconds {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}s", self.0)
    }
}

enum Scale {
    /// Power-of-ten scaling, applied in the decimal exponent so that
    /// `"0.86us"` and `"8.6e-7"` parse to the same `f64`.
    Decimal(i32),
    Factor(f64),
}

const SUFFIXES: &[(&str, Scale)] = &[
    ("days", Scale::Factor(86_400.0)),
    ("day", Scale::Factor(86_400.0)),
    ("min", Scale::Factor(60.0)),
    ("ms", Scale::Decimal(-3)),
    ("us", Scale::Decimal(-6)),
    ("µs", Scale::Decimal(-6)),
    ("ns", Scale::Decimal(-9)),
    ("h", Scale::Factor(3_600.0)),
    ("s", Scale::Decimal(0)),
];

fn parse_scaled(number: &str, scale: &Scale) -> Option<f64> {
    match scale {
        Scale::Factor(f) => number.parse::<f64>().ok().map(|v| v * f),
        Scale::Decimal(shift) => {
            let (mantissa, exp) = match number.find(['e', 'E']) {
                Some(i) => (&number[..i], number[i + 1..].parse::<i32>().ok()?),
                None => (number, 0),
            };
            mantissa.parse::<f64>().ok()?;
            format!("{mantissa}e{}", exp + shift).parse().ok()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DurationParseError(String);

impl fmt::Display for DurationParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "invalid duration `{}` (expected a number with suffix s, ms, us, ns, min, h or days)",
            self.0
        )
    }
}

impl std::error::Error for DurationParseError {}

impl FromStr for Seconds {
    type Err = DurationParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let trimmed = s.trim();
        for (suffix, scale) in SUFFIXES {
            if let Some(number) = trimmed.strip_suffix(suffix) {
                if let Some(v) = parse_scaled(number.trim(), scale) {
                    return Ok(Seconds(v));
                }
            }
        }
        trimmed
            .parse::<f64>()
            .map(Seconds)
            .map_err(|_| DurationParseError(s.to_string()))
    }
}

impl Serialize for Seconds {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_f64(self.0)
    }
}

impl<'de> Deserialize<'de> for Seconds {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct Visitor;

        impl de::Visitor<'_> for Visitor {
            type Value = Seconds;

            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a duration in seconds or a string such as \"0.5us\"")
            }

            fn visit_f64<E: de::Error>(self, v: f64) -> Result<Seconds, E> {
                Ok(Seconds(v))
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> Result<Seconds, E> {
                Ok(Seconds(v as f64))
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> Result<Seconds, E> {
                Ok(Seconds(v as f64))
            }

            fn visit_str<E: de::Error>(self, v: &str) -> Result<Seconds, E> {
                v.parse().map_err(E::custom)
            }
        }

        deserializer.deserialize_any(Visitor)
    }
}

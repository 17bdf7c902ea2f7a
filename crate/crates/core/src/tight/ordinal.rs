use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::Error;

/// The ordinal `ω·k + n`. Ordered lexicographically by `(k, n)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct OrdinalIdx {
    pub k: usize,
    pub n: usize,
}

impl OrdinalIdx {
    pub const fn new(k: usize, n: usize) -> Self {
        Self { k, n }
    }

    pub fn is_limit(&self) -> bool {
        self.n == 0 && self.k > 0
    }
}

impl fmt::Display for OrdinalIdx {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.k, self.n) {
            (0, n) => write!(f, "{n}"),
            (1, 0) => write!(f, "ω"),
            (1, n) => write!(f, "ω+{n}"),
            (k, 0) => write!(f, "ω·{k}"),
            (k, n) => write!(f, "ω·{k}+{n}"),
        }
    }
}

impl FromStr for OrdinalIdx {
    type Err = Error;

    /// Accepts `n`, `ω`, `ω·k`, `ω+n`, `ω·k+n`; `w` may stand for `ω` and
    /// `*` for `·`.
    fn from_str(s: &str) -> Result<Self, Error> {
        let bad = || Error::Parse(format!("not an ordinal below ω·ω: {s:?}"));
        let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let t = t.replace('w', "ω").replace('*', "·");
        if let Ok(n) = t.parse::<usize>() {
            return Ok(Self::new(0, n));
        }
        let rest = t.strip_prefix('ω').ok_or_else(bad)?;
        let (k_part, n_part) = match rest.split_once('+') {
            Some((a, b)) => (a, Some(b)),
            None => (rest, None),
        };
        let k = match k_part.strip_prefix('·') {
            Some(k) => k.parse::<usize>().map_err(|_| bad())?,
            None if k_part.is_empty() => 1,
            None => return Err(bad()),
        };
        let n = match n_part {
            Some(n) => n.parse::<usize>().map_err(|_| bad())?,
            None => 0,
        };
        if k == 0 {
            return Err(bad());
        }
        Ok(Self::new(k, n))
    }
}

impl Serialize for OrdinalIdx {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for OrdinalIdx {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn display_and_parse() {
        for (o, s) in [
            (OrdinalIdx::new(0, 3), "3"),
            (OrdinalIdx::new(1, 0), "ω"),
            (OrdinalIdx::new(1, 2), "ω+2"),
            (OrdinalIdx::new(2, 0), "ω·2"),
            (OrdinalIdx::new(2, 5), "ω·2+5"),
        ] {
            assert_eq!(o.to_string(), s);
            assert_eq!(s.parse::<OrdinalIdx>().unwrap(), o);
        }
        assert_eq!("w*2".parse::<OrdinalIdx>().unwrap(), OrdinalIdx::new(2, 0));
        assert!("ω·0".parse::<OrdinalIdx>().is_err());
        assert!("x".parse::<OrdinalIdx>().is_err());
    }

    #[test]
    fn lexicographic_order() {
        assert!(OrdinalIdx::new(0, 100) < OrdinalIdx::new(1, 0));
        assert!(OrdinalIdx::new(1, 1) < OrdinalIdx::new(2, 0));
        assert!(OrdinalIdx::new(2, 0).is_limit());
        assert!(!OrdinalIdx::new(0, 0).is_limit());
    }
}

//! Augmented switching laws: the symbolic arc/tangent-marker sequence that
//! names a trajectory's structure without its stage durations.
//!
//! ASCII grammar, whitespace separated:
//!
//! * `k+` / `k-` — a system behavior: `0+` is the unconstrained arc
//!   `u = +M_0`, `k+` with `k >= 1` the constrained arc `x_k = +M_k`.
//! * `(k+,h)` / `(k-,h)` — a tangent marker: `|x_k|` grazes `M_k` with
//!   contact degree `h` (an even integer `< k`, or exactly `k`).

use std::fmt;
use std::str::FromStr;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn as_f64(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }

    fn as_char(self) -> char {
        match self {
            Sign::Plus => '+',
            Sign::Minus => '-',
        }
    }
}

/// One element of an augmented switching law.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AslItem {
    /// `k = 0`: unconstrained arc `u = sign * M_0`; `k >= 1`: constrained
    /// arc `x_k = sign * M_k`.
    Behavior { k: u32, sign: Sign },
    /// `|x_k|` tangent to `M_k` on the `sign` side with contact degree
    /// `degree`.
    Tangent { k: u32, sign: Sign, degree: u32 },
}

impl AslItem {
    fn valid(&self) -> bool {
        match *self {
            AslItem::Behavior { .. } => true,
            AslItem::Tangent { k, degree, .. } => {
                k >= 1 && (degree == k || (degree % 2 == 0 && degree < k))
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AslParseError {
    pub token: String,
}

impl fmt::Display for AslParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "malformed ASL token `{}`", self.token)
    }
}

impl std::error::Error for AslParseError {}

/// An ordered sequence of system behaviors and tangent markers.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct AugmentedSwitchingLaw {
    pub items: Vec<AslItem>,
}

impl AugmentedSwitchingLaw {
    pub fn new(items: Vec<AslItem>) -> Result<Self, AslParseError> {
        for it in &items {
            if !it.valid() {
                return Err(AslParseError {
                    token: format!("{it:?}"),
                });
            }
        }
        Ok(AugmentedSwitchingLaw { items })
    }
}

impl fmt::Display for AugmentedSwitchingLaw {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, item) in self.items.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            match *item {
                AslItem::Behavior { k, sign } => write!(f, "{}{}", k, sign.as_char())?,
                AslItem::Tangent { k, sign, degree } => {
                    write!(f, "({}{},{})", k, sign.as_char(), degree)?
                }
            }
        }
        Ok(())
    }
}

impl FromStr for AugmentedSwitchingLaw {
    type Err = AslParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut items = Vec::new();
        for tok in s.split_whitespace() {
            items.push(parse_token(tok)?);
        }
        AugmentedSwitchingLaw::new(items)
    }
}

fn parse_token(tok: &str) -> Result<AslItem, AslParseError> {
    let err = || AslParseError {
        token: tok.to_string(),
    };
    if let Some(inner) = tok.strip_prefix('(').and_then(|t| t.strip_suffix(')')) {
        let (head, deg) = inner.split_once(',').ok_or_else(err)?;
        let (k, sign) = parse_behavior(head).ok_or_else(err)?;
        let degree: u32 = deg.parse().map_err(|_| err())?;
        let item = AslItem::Tangent { k, sign, degree };
        if !item.valid() {
            return Err(err());
        }
        Ok(item)
    } else {
        let (k, sign) = parse_behavior(tok).ok_or_else(err)?;
        Ok(AslItem::Behavior { k, sign })
    }
}

fn parse_behavior(s: &str) -> Option<(u32, Sign)> {
    let sign = match s.chars().last()? {
        '+' => Sign::Plus,
        '-' => Sign::Minus,
        _ => return None,
    };
    let digits = &s[..s.len() - 1];
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    digits.parse().ok().map(|k| (k, sign))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b(k: u32, sign: Sign) -> AslItem {
        AslItem::Behavior { k, sign }
    }

    #[test]
    fn renders_third_order_example() {
        // unconstrained/constrained arcs around a degree-2 graze of x_3 at -M_3
        let law = AugmentedSwitchingLaw::new(vec![
            b(0, Sign::Plus),
            b(1, Sign::Plus),
            b(0, Sign::Minus),
            AslItem::Tangent {
                k: 3,
                sign: Sign::Minus,
                degree: 2,
            },
            b(0, Sign::Minus),
            b(0, Sign::Plus),
            b(0, Sign::Minus),
        ])
        .unwrap();
        assert_eq!(law.to_string(), "0+ 1+ 0- (3-,2) 0- 0+ 0-");
        assert_eq!(
            law.to_string().parse::<AugmentedSwitchingLaw>().unwrap(),
            law
        );
    }

    #[test]
    fn empty_law() {
        let law = AugmentedSwitchingLaw::default();
        assert_eq!(law.to_string(), "");
        assert_eq!("".parse::<AugmentedSwitchingLaw>().unwrap(), law);
    }

    #[test]
    fn parses_simple_pair() {
        let law: AugmentedSwitchingLaw = "0+ 0-".parse().unwrap();
        assert_eq!(law.items, vec![b(0, Sign::Plus), b(0, Sign::Minus)]);
    }

    #[test]
    fn rejects_malformed() {
        assert!("0".parse::<AugmentedSwitchingLaw>().is_err());
        assert!("x+".parse::<AugmentedSwitchingLaw>().is_err());
        assert!("(3-,5)".parse::<AugmentedSwitchingLaw>().is_err()); // odd degree < k
        assert!("(3-".parse::<AugmentedSwitchingLaw>().is_err());
        assert!("(0+,2)".parse::<AugmentedSwitchingLaw>().is_err()); // tangent needs k >= 1
    }

    #[test]
    fn tangent_degree_rule() {
        // degree == k allowed, even degree < k allowed, otherwise invalid
        assert!("(3+,3)".parse::<AugmentedSwitchingLaw>().is_ok());
        assert!("(3+,2)".parse::<AugmentedSwitchingLaw>().is_ok());
        assert!("(4-,2)".parse::<AugmentedSwitchingLaw>().is_ok());
        assert!("(4-,3)".parse::<AugmentedSwitchingLaw>().is_err());
    }
}

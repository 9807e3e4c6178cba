use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_traits::{One, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::linalg::{format_rational, parse_rational, Rational};

/// Basis symbol `e_i`, `x` or `y`.
///
/// The derived order is the canonical basis order `e_1 < e_2 < ... < x < y`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum BasisSymbol {
    E(u32),
    X,
    Y,
}

impl BasisSymbol {
    /// Filtration degree: `deg(e_i) = i`, `deg(x) = deg(y) = 0`.
    pub fn degree(self) -> u32 {
        match self {
            BasisSymbol::E(i) => i,
            BasisSymbol::X | BasisSymbol::Y => 0,
        }
    }
}

impl fmt::Display for BasisSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BasisSymbol::E(i) => write!(f, "e{i}"),
            BasisSymbol::X => f.write_str("x"),
            BasisSymbol::Y => f.write_str("y"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid basis symbol {0:?}")]
pub struct ParseSymbolError(pub String);

impl FromStr for BasisSymbol {
    type Err = ParseSymbolError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "x" => Ok(BasisSymbol::X),
            "y" => Ok(BasisSymbol::Y),
            t => t
                .strip_prefix('e')
                .and_then(|d| d.parse::<u32>().ok())
                .filter(|&i| i >= 1)
                .map(BasisSymbol::E)
                .ok_or_else(|| ParseSymbolError(s.to_string())),
        }
    }
}

impl Serialize for BasisSymbol {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for BasisSymbol {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Finite rational linear combination of basis symbols.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Element {
    terms: BTreeMap<BasisSymbol, Rational>,
}

impl Element {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn basis(sym: BasisSymbol) -> Self {
        Self::term(sym, Rational::one())
    }

    pub fn term(sym: BasisSymbol, coeff: Rational) -> Self {
        let mut e = Self::zero();
        e.add_term(sym, &coeff);
        e
    }

    pub fn from_terms<I: IntoIterator<Item = (BasisSymbol, Rational)>>(terms: I) -> Self {
        let mut e = Self::zero();
        for (s, q) in terms {
            e.add_term(s, &q);
        }
        e
    }

    pub fn add_term(&mut self, sym: BasisSymbol, coeff: &Rational) {
        if coeff.is_zero() {
            return;
        }
        let slot = self.terms.entry(sym).or_insert_with(Rational::zero);
        *slot += coeff;
        if slot.is_zero() {
            self.terms.remove(&sym);
        }
    }

    pub fn coeff(&self, sym: BasisSymbol) -> Rational {
        self.terms.get(&sym).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (BasisSymbol, &Rational)> + '_ {
        self.terms.iter().map(|(s, q)| (*s, q))
    }

    pub fn scaled(&self, c: &Rational) -> Element {
        Element::from_terms(self.terms.iter().map(|(s, q)| (*s, q * c)))
    }

    pub fn max_e_index(&self) -> Option<u32> {
        self.terms
            .keys()
            .filter_map(|s| match s {
                BasisSymbol::E(i) => Some(*i),
                _ => None,
            })
            .max()
    }
}

impl std::ops::Add<&Element> for &Element {
    type Output = Element;
    fn add(self, rhs: &Element) -> Element {
        let mut out = self.clone();
        for (s, q) in rhs.iter() {
            out.add_term(s, q);
        }
        out
    }
}

impl std::ops::Sub<&Element> for &Element {
    type Output = Element;
    fn sub(self, rhs: &Element) -> Element {
        let mut out = self.clone();
        for (s, q) in rhs.iter() {
            out.add_term(s, &-q.clone());
        }
        out
    }
}

impl std::ops::Neg for Element {
    type Output = Element;
    fn neg(self) -> Element {
        Element::from_terms(self.terms.into_iter().map(|(s, q)| (s, -q)))
    }
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        for (n, (sym, q)) in self.terms.iter().enumerate() {
            let neg = q < &Rational::zero();
            let mag = if neg { -q.clone() } else { q.clone() };
            match (n, neg) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            if mag.is_one() {
                write!(f, "{sym}")?;
            } else {
                write!(f, "{}*{sym}", format_rational(&mag))?;
            }
        }
        Ok(())
    }
}

/// Serialized as `[["e3", "1/2"], ["x", "-1"]]` in canonical basis order.
impl Serialize for Element {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let pairs: Vec<(String, String)> = self
            .terms
            .iter()
            .map(|(sym, q)| (sym.to_string(), format_rational(q)))
            .collect();
        pairs.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Element {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let pairs = Vec::<(String, String)>::deserialize(d)?;
        let mut e = Element::zero();
        for (sym, q) in pairs {
            let sym: BasisSymbol = sym.parse().map_err(D::Error::custom)?;
            let q = parse_rational(&q).map_err(D::Error::custom)?;
            e.add_term(sym, &q);
        }
        Ok(e)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{rat, ratio};

    #[test]
    fn canonical_order() {
        let mut v = vec![BasisSymbol::Y, BasisSymbol::E(10), BasisSymbol::X, BasisSymbol::E(2)];
        v.sort();
        assert_eq!(
            v,
            vec![BasisSymbol::E(2), BasisSymbol::E(10), BasisSymbol::X, BasisSymbol::Y]
        );
    }

    #[test]
    fn symbol_parse() {
        assert_eq!("e12".parse::<BasisSymbol>().unwrap(), BasisSymbol::E(12));
        assert_eq!("y".parse::<BasisSymbol>().unwrap(), BasisSymbol::Y);
        assert!("e0".parse::<BasisSymbol>().is_err());
        assert!("z".parse::<BasisSymbol>().is_err());
    }

    #[test]
    fn element_cancels_and_prints() {
        let a = Element::from_terms([
            (BasisSymbol::E(3), rat(1)),
            (BasisSymbol::X, ratio(-1, 2)),
        ]);
        assert_eq!(a.to_string(), "e3 - 1/2*x");
        let z = &a - &a;
        assert!(z.is_zero());
        let json = serde_json::to_string(&a).unwrap();
        assert_eq!(json, r#"[["e3","1"],["x","-1/2"]]"#);
        assert_eq!(serde_json::from_str::<Element>(&json).unwrap(), a);
    }
}

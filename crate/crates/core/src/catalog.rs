//! Built-in algebra families.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::algebra::{
    BasisSymbol, BracketRule, CoeffForm, Element, IndexForm, ParamArray, Pattern, Presentation,
    PresentationError, Quotient, QuotientError, RuleTerm, Target, Window,
};
use crate::linalg::{rat, Matrix, Rational, SparseVec};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum FamilyId {
    M0,
    M2,
    M0Beta,
    M2Gamma,
    M0Tilde,
    M2Tilde,
    WittPositive,
}

impl FamilyId {
    pub const ALL: [FamilyId; 7] = [
        FamilyId::M0,
        FamilyId::M2,
        FamilyId::M0Beta,
        FamilyId::M2Gamma,
        FamilyId::M0Tilde,
        FamilyId::M2Tilde,
        FamilyId::WittPositive,
    ];

    pub fn cli_name(self) -> &'static str {
        match self {
            FamilyId::M0 => "m0",
            FamilyId::M2 => "m2",
            FamilyId::M0Beta => "M0",
            FamilyId::M2Gamma => "M2",
            FamilyId::M0Tilde => "M0t",
            FamilyId::M2Tilde => "M2t",
            FamilyId::WittPositive => "wittpos",
        }
    }

    pub fn is_parameterized(self) -> bool {
        matches!(self, FamilyId::M0Beta | FamilyId::M2Gamma)
    }

    /// Name and first index of the parameter array.
    pub fn param_array(self) -> Option<(&'static str, i64)> {
        match self {
            FamilyId::M0Beta => Some(("beta", 3)),
            FamilyId::M2Gamma => Some(("gamma", 4)),
            _ => None,
        }
    }

    pub fn description(self) -> &'static str {
        match self {
            FamilyId::M0 => "[e_i, e_1] = e_{i+1} (i >= 2)",
            FamilyId::M2 => "[e_1, e_i] = e_{i+1} (i >= 2), [e_2, e_j] = e_{j+2} (j >= 3)",
            FamilyId::M0Beta => {
                "m0 + [x, e_1] = -e_1, [x, e_i] = (1-i) e_i - sum_k beta_k e_{k+i-2}, [y, e_i] = -e_i"
            }
            FamilyId::M2Gamma => {
                "m2 + [x, e_1] = -e_1, [x, e_i] = -i e_i - sum_j gamma_j e_{j+i-2}"
            }
            FamilyId::M0Tilde => "M0 with empty beta",
            FamilyId::M2Tilde => "M2 with empty gamma",
            FamilyId::WittPositive => "[e_i, e_j] = (j-i) e_{i+j} (i, j >= 1)",
        }
    }
}

impl fmt::Display for FamilyId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.cli_name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CatalogError {
    #[error("unknown family {0:?} (expected one of m0, m2, M0, M2, M0t, M2t, wittpos)")]
    UnknownFamily(String),
    #[error("family {0} requires a parameter vector")]
    MissingParams(FamilyId),
    #[error("family {0} takes no parameters")]
    UnexpectedParams(FamilyId),
    #[error("family {family}: parameters start at index {expected}, got {found}")]
    IndexRange {
        family: FamilyId,
        expected: i64,
        found: i64,
    },
    #[error(transparent)]
    Presentation(#[from] PresentationError),
    #[error(transparent)]
    Quotient(#[from] QuotientError),
}

impl FromStr for FamilyId {
    type Err = CatalogError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        FamilyId::ALL
            .into_iter()
            .find(|f| f.cli_name() == s)
            .ok_or_else(|| CatalogError::UnknownFamily(s.to_string()))
    }
}

/// Parameter list; `start` defaults to the family's first index.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ParamVector {
    pub start: Option<i64>,
    pub values: Vec<Rational>,
}

impl ParamVector {
    pub fn new(values: Vec<Rational>) -> Self {
        Self {
            start: None,
            values,
        }
    }
}

fn one() -> CoeffForm {
    CoeffForm::constant(rat(1))
}

fn e(i: i64, j: i64, k: i64, c: i64) -> Target {
    Target::E(IndexForm::new(i, j, k, c))
}

fn m0_rules() -> Vec<BracketRule> {
    vec![BracketRule {
        left: Pattern::e_from(2),
        right: Pattern::e_exact(1),
        terms: vec![RuleTerm::affine(one(), e(1, 0, 0, 1))],
    }]
}

fn m2_rules() -> Vec<BracketRule> {
    vec![
        BracketRule {
            left: Pattern::e_exact(1),
            right: Pattern::e_from(2),
            terms: vec![RuleTerm::affine(one(), e(0, 1, 0, 1))],
        },
        BracketRule {
            left: Pattern::e_exact(2),
            right: Pattern::e_from(3),
            terms: vec![RuleTerm::affine(one(), e(0, 1, 0, 2))],
        },
    ]
}

fn x_on_e1() -> BracketRule {
    BracketRule {
        left: Pattern::X,
        right: Pattern::e_exact(1),
        terms: vec![RuleTerm::affine(CoeffForm::constant(rat(-1)), e(0, 1, 0, 0))],
    }
}

/// `[x, e_j] = (c_j j + c) e_j - sum_k p_k e_{k+j-2}` for `j >= 2`.
fn x_diagonal(c_j: i64, c: i64, param: &str) -> BracketRule {
    BracketRule {
        left: Pattern::X,
        right: Pattern::e_from(2),
        terms: vec![
            RuleTerm::affine(
                CoeffForm {
                    i: rat(0),
                    j: rat(c_j),
                    c: rat(c),
                },
                e(0, 1, 0, 0),
            ),
            RuleTerm::param_sum(param, rat(-1), e(0, 1, 1, -2)),
        ],
    }
}

pub fn instantiate(f: FamilyId, params: Option<&ParamVector>) -> Result<Presentation, CatalogError> {
    let values: Vec<Rational> = match (f, params) {
        (FamilyId::M0Beta | FamilyId::M2Gamma, None) => return Err(CatalogError::MissingParams(f)),
        (FamilyId::M0Beta | FamilyId::M2Gamma, Some(p)) => {
            let (_, start) = f.param_array().expect("parameterized");
            if let Some(found) = p.start.filter(|s| *s != start) {
                return Err(CatalogError::IndexRange {
                    family: f,
                    expected: start,
                    found,
                });
            }
            p.values.clone()
        }
        (_, Some(_)) => return Err(CatalogError::UnexpectedParams(f)),
        (_, None) => Vec::new(),
    };
    let name = f.cli_name();
    let p = match f {
        FamilyId::M0 => Presentation::new(name, false, false, m0_rules(), BTreeMap::new())?,
        FamilyId::M2 => Presentation::new(name, false, false, m2_rules(), BTreeMap::new())?,
        FamilyId::M0Beta | FamilyId::M0Tilde => {
            let mut rules = m0_rules();
            rules.push(x_on_e1());
            rules.push(x_diagonal(-1, 1, "beta"));
            rules.push(BracketRule {
                left: Pattern::Y,
                right: Pattern::e_from(2),
                terms: vec![RuleTerm::affine(CoeffForm::constant(rat(-1)), e(0, 1, 0, 0))],
            });
            let mut params = BTreeMap::new();
            params.insert("beta".to_string(), ParamArray::new(3, values));
            Presentation::new(name, true, true, rules, params)?
        }
        FamilyId::M2Gamma | FamilyId::M2Tilde => {
            let mut rules = m2_rules();
            rules.push(x_on_e1());
            rules.push(x_diagonal(-1, 0, "gamma"));
            let mut params = BTreeMap::new();
            params.insert("gamma".to_string(), ParamArray::new(4, values));
            Presentation::new(name, true, false, rules, params)?
        }
        FamilyId::WittPositive => {
            let rule = BracketRule {
                left: Pattern::e_from(1),
                right: Pattern::e_from(1),
                terms: vec![RuleTerm::affine(
                    CoeffForm {
                        i: rat(-1),
                        j: rat(1),
                        c: rat(0),
                    },
                    e(1, 1, 0, 0),
                )],
            };
            Presentation::new(name, false, false, vec![rule], BTreeMap::new())?
        }
    };
    Ok(p)
}

/// Quotient of a catalog family in a window.
pub fn family_quotient(
    f: FamilyId,
    params: Option<&ParamVector>,
    window: Window,
) -> Result<Quotient, CatalogError> {
    Ok(Quotient::new(&instantiate(f, params)?, window)?)
}

/// Structure table of the quotient in the basis `b'_a = images[a]`
/// (unlisted symbols map to themselves).
pub fn apply_basis_change(
    q: &Quotient,
    images: &BTreeMap<BasisSymbol, Element>,
) -> Result<Quotient, QuotientError> {
    let n = q.dim();
    let mut columns = Vec::with_capacity(n);
    for k in 0..n {
        let v = match images.get(&q.symbol(k)) {
            Some(img) => q.to_vec(img)?,
            None => SparseVec::unit(k),
        };
        columns.push(v);
    }
    for s in images.keys() {
        q.index_of(*s).ok_or(QuotientError::OutsideQuotient(*s))?;
    }
    let change = Matrix::from_columns(n, &columns).expect("columns live in the quotient");
    let rank = change.rank();
    if rank < n {
        return Err(QuotientError::NotInvertible { rank, dim: n });
    }
    let inverse_cols: Vec<SparseVec> = (0..n)
        .map(|k| {
            change
                .solve(&SparseVec::unit(k))
                .expect("square system")
                .expect("invertible")
        })
        .collect();
    let inverse = Matrix::from_columns(n, &inverse_cols).expect("square");
    let mut table = vec![vec![SparseVec::new(); n]; n];
    for a in 0..n {
        for b in a + 1..n {
            let br = q.bracket_vec(&columns[a], &columns[b]);
            let coords = inverse.mul_vec(&br).expect("square");
            table[b][a] = -coords.clone();
            table[a][b] = coords;
        }
    }
    Quotient::from_table(
        format!("{}'", q.name()),
        q.window(),
        q.has_x(),
        q.has_y(),
        table,
    )
}

/// Entry-wise comparison of `q` with the family's table at the same window.
pub fn canonical_form_equal(
    q: &Quotient,
    f: FamilyId,
    params: Option<&ParamVector>,
) -> Result<bool, CatalogError> {
    let canonical = family_quotient(f, params, q.window())?;
    Ok(q.same_table(&canonical)?)
}

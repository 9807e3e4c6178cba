//! JSON ingest for custom presentations.
//!
//! ```json
//! {
//!   "name": "m0",
//!   "has_x": false,
//!   "has_y": false,
//!   "params": {},
//!   "rules": [
//!     {
//!       "left":  {"kind": "E", "var": "i", "min": 2},
//!       "right": {"kind": "E", "var": "j", "min": 1, "max": 1},
//!       "terms": [{"target": {"kind": "E", "index": {"i": 1, "const": 1}}}]
//!     }
//!   ]
//! }
//! ```

use std::collections::BTreeMap;

use serde::Deserialize;
use thiserror::Error;

use super::presentation::{
    BracketRule, CoeffForm, Coefficient, IndexForm, ParamArray, Pattern, Presentation,
    PresentationError, RuleTerm, Target,
};
use crate::linalg::{parse_rational, rat, Rational};

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("malformed presentation JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("rule {rule}: {reason}")]
    Rule { rule: usize, reason: String },
    #[error("rule {rule}, term {term}: {reason}")]
    Term {
        rule: usize,
        term: usize,
        reason: String,
    },
    #[error("parameter {name:?}: {reason}")]
    Param { name: String, reason: String },
    #[error(transparent)]
    Invalid(#[from] PresentationError),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Doc {
    name: String,
    #[serde(default)]
    has_x: bool,
    #[serde(default)]
    has_y: bool,
    #[serde(default)]
    params: BTreeMap<String, ParamDoc>,
    rules: Vec<RuleDoc>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum ParamDoc {
    List(Vec<String>),
    Indexed { start: i64, values: Vec<String> },
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RuleDoc {
    left: PatternDoc,
    right: PatternDoc,
    #[serde(default)]
    terms: Vec<TermDoc>,
}

#[derive(Deserialize)]
#[serde(tag = "kind", deny_unknown_fields)]
enum PatternDoc {
    E {
        #[serde(default)]
        var: Option<String>,
        min: u32,
        #[serde(default)]
        max: Option<u32>,
    },
    X,
    Y,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct TermDoc {
    #[serde(default)]
    coeff: Option<BTreeMap<String, String>>,
    #[serde(default)]
    sum: Option<SumDoc>,
    target: TargetDoc,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SumDoc {
    param: String,
    #[serde(default)]
    var: Option<String>,
    #[serde(default)]
    scale: Option<String>,
}

#[derive(Deserialize)]
#[serde(tag = "kind", deny_unknown_fields)]
enum TargetDoc {
    E { index: BTreeMap<String, i64> },
    X,
    Y,
}

pub fn parse_presentation(text: &str) -> Result<Presentation, IngestError> {
    let doc: Doc = serde_json::from_str(text)?;
    let mut params = BTreeMap::new();
    for (name, p) in doc.params {
        let (start, values) = match p {
            ParamDoc::List(v) => (1, v),
            ParamDoc::Indexed { start, values } => (start, values),
        };
        let values = values
            .iter()
            .map(|s| parse_rational(s))
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| IngestError::Param {
                name: name.clone(),
                reason: e.to_string(),
            })?;
        params.insert(name, ParamArray::new(start, values));
    }
    let mut rules = Vec::with_capacity(doc.rules.len());
    for (r, rule) in doc.rules.into_iter().enumerate() {
        let (left, lvar) = pattern(rule.left, "i");
        let (right, rvar) = pattern(rule.right, "j");
        if lvar.is_some() && lvar == rvar {
            return Err(IngestError::Rule {
                rule: r,
                reason: "left and right patterns bind the same variable".into(),
            });
        }
        let vars = Vars { i: lvar, j: rvar };
        let mut terms = Vec::with_capacity(rule.terms.len());
        for (t, term) in rule.terms.into_iter().enumerate() {
            let fail = |reason: String| IngestError::Term {
                rule: r,
                term: t,
                reason,
            };
            terms.push(build_term(term, &vars).map_err(fail)?);
        }
        rules.push(BracketRule { left, right, terms });
    }
    Ok(Presentation::new(
        doc.name, doc.has_x, doc.has_y, rules, params,
    )?)
}

struct Vars {
    i: Option<String>,
    j: Option<String>,
}

fn pattern(p: PatternDoc, default_var: &str) -> (Pattern, Option<String>) {
    match p {
        PatternDoc::E { var, min, max } => (
            Pattern::E { min, max },
            Some(var.unwrap_or_else(|| default_var.to_string())),
        ),
        PatternDoc::X => (Pattern::X, None),
        PatternDoc::Y => (Pattern::Y, None),
    }
}

enum Slot {
    I,
    J,
    K,
    Const,
}

fn slot(name: &str, vars: &Vars, k: Option<&str>) -> Result<Slot, String> {
    if name == "const" {
        Ok(Slot::Const)
    } else if vars.i.as_deref() == Some(name) {
        Ok(Slot::I)
    } else if vars.j.as_deref() == Some(name) {
        Ok(Slot::J)
    } else if k == Some(name) {
        Ok(Slot::K)
    } else {
        Err(format!("unbound variable {name:?}"))
    }
}

fn build_term(term: TermDoc, vars: &Vars) -> Result<RuleTerm, String> {
    let k_name = term
        .sum
        .as_ref()
        .map(|s| s.var.clone().unwrap_or_else(|| "k".to_string()));
    let coeff = match (term.coeff, term.sum) {
        (Some(_), Some(_)) => return Err("a term has either \"coeff\" or \"sum\", not both".into()),
        (None, None) => Coefficient::Affine(CoeffForm::constant(rat(1))),
        (Some(map), None) => {
            let mut form = CoeffForm::constant(rat(0));
            for (name, value) in map {
                let q: Rational = parse_rational(&value).map_err(|e| e.to_string())?;
                match slot(&name, vars, None)? {
                    Slot::I => form.i = q,
                    Slot::J => form.j = q,
                    Slot::Const => form.c = q,
                    Slot::K => unreachable!("k is never bound for affine coefficients"),
                }
            }
            Coefficient::Affine(form)
        }
        (None, Some(sum)) => Coefficient::ParamSum {
            param: sum.param,
            scale: match sum.scale {
                Some(s) => parse_rational(&s).map_err(|e| e.to_string())?,
                None => rat(1),
            },
        },
    };
    let target = match term.target {
        TargetDoc::X => Target::X,
        TargetDoc::Y => Target::Y,
        TargetDoc::E { index } => {
            let mut form = IndexForm::default();
            for (name, value) in index {
                match slot(&name, vars, k_name.as_deref())? {
                    Slot::I => form.i = value,
                    Slot::J => form.j = value,
                    Slot::K => form.k = value,
                    Slot::Const => form.c = value,
                }
            }
            Target::E(form)
        }
    };
    Ok(RuleTerm { coeff, target })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unbound_variable_reports_rule_and_term() {
        let text = r#"{"name":"bad","rules":[{"left":{"kind":"E","min":2},"right":{"kind":"E","min":1,"max":1},
            "terms":[{"target":{"kind":"E","index":{"q":1}}}]}]}"#;
        match parse_presentation(text) {
            Err(IngestError::Term { rule: 0, term: 0, .. }) => {}
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn indexed_params() {
        let text = r#"{"name":"p","has_x":true,"params":{"beta":{"start":3,"values":["1/2"]}},
            "rules":[{"left":{"kind":"X"},"right":{"kind":"E","min":2},
            "terms":[{"sum":{"param":"beta","scale":"-1"},"target":{"kind":"E","index":{"k":1,"j":1,"const":-2}}}]}]}"#;
        let p = parse_presentation(text).unwrap();
        assert_eq!(p.params()["beta"].start, 3);
        assert_eq!(p.max_shift(), Some(1));
    }
}

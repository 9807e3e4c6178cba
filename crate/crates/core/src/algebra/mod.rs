//! Algebras given by index-parametric bracket rules and their finite quotients.

pub mod basis;
pub mod checks;
pub mod json;
pub mod presentation;
pub mod quotient;

pub use basis::{BasisSymbol, Element, ParseSymbolError};
pub use checks::{
    center, derived_series, jacobi_check, lower_central_series, pro_check, JacobiFailure,
    JacobiReport, ProReport, SeriesReport,
};
pub use json::{parse_presentation, IngestError};
pub use presentation::{
    BracketRule, CoeffForm, Coefficient, IndexForm, ParamArray, Pattern, Presentation,
    PresentationError, RuleTerm, Target,
};
pub use quotient::{Quotient, QuotientError, Window};

//! Expression language for analytic functions and self-maps of the disk.

mod ast;
mod certify;
mod parse;
mod print;
pub mod random;

pub use ast::AnalyticMap;
pub use certify::{certify_self_map, SelfMapCertificate, SELF_MAP_TOL};
pub use parse::parse_symbol;

pub(crate) use certify::argmax;

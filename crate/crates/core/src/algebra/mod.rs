pub mod field;
pub mod fieldlin;
pub mod howell;
pub mod matrix;
pub mod ring;
pub mod sparse;
pub mod submodule;

pub use field::{Fe, Field, FieldSpec};
pub use matrix::LambdaMatrix;
pub use ring::{Lambda, LambdaSpec};
pub use submodule::{LambdaSubmodule, RankSummary};

//! Exact computation with polynomial Poisson algebras, their (double)
//! Poisson-Ore extensions and Poisson enveloping algebras in PBW normal form.

pub mod envelope;
pub mod expr;
pub mod extension;
pub mod kahler;
pub mod poisson;
pub mod poly;
pub mod verify;

pub use envelope::{EnvAlgebra, EnvElement, EnvError, EnvKey, EnvLayer, GDegree};
pub use extension::{
    build_double_poisson_ore, build_poisson_ore_single, check_dedata, decompose_iterated, DEDataPoisson,
    ExtensionError, PoissonOreData,
};
pub use kahler::KahlerElement;
pub use poisson::{JacobiVerdict, PoissonAlgebra};
pub use poly::{Derivation, Polynomial, Rational, VarTable};
pub use verify::{CheckStatus, VerdictReport};

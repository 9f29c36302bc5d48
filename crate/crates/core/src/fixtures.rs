//! Bundled instances: small group algebras, Clifford algebras, truncated
//! polynomial rings with the Kähler-type calculus, and `M₂(ℚ)`.

use std::sync::Arc;

use crate::algebra::{
    clifford_algebra, cyclic_table, group_algebra, matrix_algebra, symmetric3_table,
    truncated_polynomial, Algebra,
};
use crate::calculus::{
    calculus_from_relations, kahler_commutators, maximal_prolongation, universal_calculus,
    Calculus, Exterior2,
};
use crate::error::{Error, Result};
use crate::exactla::{Mat, Scalar};
use crate::vectorfields::{canonical_gram, GramFamily};

pub struct Fixture {
    pub name: &'static str,
    pub algebra: Arc<Algebra>,
    pub calculus: Arc<Calculus>,
    pub exterior2: Exterior2,
    pub gram: Option<Mat>,
}

impl std::fmt::Debug for Fixture {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Fixture")
            .field("name", &self.name)
            .field("dim", &self.algebra.dim())
            .field("dim_omega1", &self.calculus.dim_omega1())
            .finish()
    }
}

pub const FIXTURE_NAMES: [&str; 9] = [
    "z2", "z3", "s3", "clifford1", "clifford2", "trunc2", "trunc3", "trunc4", "m2",
];

fn build(name: &'static str, a: Algebra, kahler: bool, gram: Option<GramFamily>) -> Result<Fixture> {
    let algebra = Arc::new(a);
    let calculus = Arc::new(if kahler {
        calculus_from_relations(&algebra, &kahler_commutators(&algebra))?
    } else {
        universal_calculus(&algebra)?
    });
    let exterior2 = maximal_prolongation(&calculus)?;
    let gram = gram.map(|g| canonical_gram(&algebra, g)).transpose()?;
    Ok(Fixture {
        name,
        algebra,
        calculus,
        exterior2,
        gram,
    })
}

pub fn fixture(name: &str) -> Result<Fixture> {
    let ones = |m: usize| vec![Scalar::one(); m];
    match name {
        "z2" => build("z2", group_algebra(&cyclic_table(2))?, false, Some(GramFamily::Group)),
        "z3" => build("z3", group_algebra(&cyclic_table(3))?, false, Some(GramFamily::Group)),
        "s3" => build("s3", group_algebra(&symmetric3_table())?, false, Some(GramFamily::Group)),
        "clifford1" => build("clifford1", clifford_algebra(&ones(1))?, false, Some(GramFamily::Clifford)),
        "clifford2" => build("clifford2", clifford_algebra(&ones(2))?, false, Some(GramFamily::Clifford)),
        "trunc2" => build("trunc2", truncated_polynomial(2)?, true, None),
        "trunc3" => build("trunc3", truncated_polynomial(3)?, true, None),
        "trunc4" => build("trunc4", truncated_polynomial(4)?, true, None),
        "m2" => build("m2", matrix_algebra(2)?, false, None),
        other => Err(Error::Parse(format!("unknown fixture '{other}'"))),
    }
}

pub fn fixtures() -> Result<Vec<Fixture>> {
    FIXTURE_NAMES.iter().map(|n| fixture(n)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_fixtures_build() {
        let fs = fixtures().unwrap();
        let dims: Vec<(usize, usize)> = fs
            .iter()
            .map(|f| (f.algebra.dim(), f.calculus.dim_omega1()))
            .collect();
        assert_eq!(
            dims,
            vec![(2, 2), (3, 6), (6, 30), (2, 2), (4, 12), (2, 1), (3, 2), (4, 3), (4, 12)]
        );
        assert!(fixture("nope").is_err());
    }
}

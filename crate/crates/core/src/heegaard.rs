//! Presentations and first-homology certificates for the Heegaard gluing
//! `M_h = T_g ∪_{r_g h} T_g`.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde_json::Value;

use crate::filtration::r_g;
use crate::json::ints_to_json;
use crate::word::{FreeEndo, Generator, GroupWord};
use crate::zlinalg::{determinant, snf, IntMatrix};

/// Generators `y_1..y_g` with relators over the `y` alphabet.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupPresentation {
    pub genus: usize,
    pub relators: Vec<GroupWord>,
}

impl GroupPresentation {
    /// Relators written with `y` symbols only.
    pub fn new(genus: usize, relators: Vec<GroupWord>) -> Self {
        assert!(relators.iter().all(|r| r.only_y()), "relators must be over the y alphabet");
        GroupPresentation { genus, relators }
    }

    /// Rows are relators, columns are exponent sums of `y_1..y_g`.
    pub fn relation_matrix(&self) -> IntMatrix {
        let rows: Vec<Vec<i64>> = self
            .relators
            .iter()
            .map(|r| {
                let ab = r.abelianize();
                (1..=self.genus).map(|i| ab[Generator::y(i).code()]).collect()
            })
            .collect();
        if rows.is_empty() {
            return IntMatrix::zeros(0, self.genus);
        }
        IntMatrix::from_i64(&rows)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HomologyReport {
    pub matrix: IntMatrix,
    pub determinant: Option<BigInt>,
    pub divisors: Vec<BigInt>,
    pub homology_sphere: bool,
}

impl HomologyReport {
    pub fn to_json(&self) -> Value {
        serde_json::json!({
            "matrix": self.matrix.to_json(),
            "determinant": self.determinant.as_ref().map(crate::json::int_to_json),
            "divisors": ints_to_json(&self.divisors),
            "homology_sphere": self.homology_sphere,
        })
    }
}

/// Relators `i_*((r_g ∘ h)(x_j))`: the glued meridians with `x` letters
/// deleted.
pub fn heegaard_presentation(h: &FreeEndo) -> GroupPresentation {
    let g = h.genus();
    let glue = r_g(g).compose(h).expect("same genus");
    let relators = (1..=g).map(|j| glue.image(Generator::x(j)).delete_x()).collect();
    GroupPresentation::new(g, relators)
}

/// Abelianized relation matrix, its Smith divisors (one per generator,
/// zeros for free summands) and the homology-sphere verdict.
pub fn first_homology(p: &GroupPresentation) -> HomologyReport {
    let matrix = p.relation_matrix();
    let determinant = (matrix.rows() == matrix.cols()).then(|| determinant(&matrix).unwrap());
    let mut divisors = if matrix.rows() == 0 { Vec::new() } else { snf(&matrix).diagonal() };
    divisors.resize(p.genus, BigInt::zero());
    let homology_sphere = divisors.iter().all(|d| d.is_one());
    debug_assert!(determinant.as_ref().is_none_or(|d| homology_sphere == d.abs().is_one()));
    HomologyReport { matrix, determinant, divisors, homology_sphere }
}

pub fn is_homology_sphere(h: &FreeEndo) -> bool {
    first_homology(&heegaard_presentation(h)).homology_sphere
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::filtration::{longitude_twist, meridian_twist, separating_twist};

    fn ints(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn identity_gives_sphere() {
        let p = heegaard_presentation(&FreeEndo::identity(2));
        let strs: Vec<String> = p.relators.iter().map(|r| r.to_string()).collect();
        assert_eq!(strs, vec!["y1", "y2"]);
        let r = first_homology(&p);
        assert_eq!(r.divisors, ints(&[1, 1]));
        assert!(r.homology_sphere);
    }

    #[test]
    fn meridian_twist_keeps_relators() {
        let id = heegaard_presentation(&FreeEndo::identity(2));
        assert_eq!(heegaard_presentation(&meridian_twist(2, 1, true)), id);
        assert!(is_homology_sphere(&separating_twist(2, 1)));
    }

    #[test]
    fn lens_like_presentation() {
        let p = GroupPresentation::new(2, vec![GroupWord::parse("y1 y1", 2).unwrap(), GroupWord::parse("y2", 2).unwrap()]);
        let r = first_homology(&p);
        assert_eq!(r.divisors, ints(&[1, 2]));
        assert!(!r.homology_sphere);
        assert_eq!(r.determinant, Some(BigInt::from(2)));
    }

    #[test]
    fn longitude_twist_is_decided_by_determinant() {
        let r = first_homology(&heegaard_presentation(&longitude_twist(1, 1, true)));
        assert_eq!(r.homology_sphere, r.determinant.unwrap().abs().is_one());
    }
}

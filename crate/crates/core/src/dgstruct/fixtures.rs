//! Small coalgebras shared by the unit tests.

use super::{DGCoalgebra, Generator};
use crate::linalg::ScalarKind;

pub fn q() -> ScalarKind {
    ScalarKind::Rational
}

/// Reduced model of S²: one class in degree 2.
pub fn sphere() -> DGCoalgebra {
    DGCoalgebra::new(q(), vec![Generator::new("s", 2, 1)], vec![vec![]], vec![vec![]], vec![], true)
        .unwrap()
}

/// Λ(x, y) with d(x∧y) = −y.
pub fn aff1() -> DGCoalgebra {
    let k = q();
    DGCoalgebra::new(
        k,
        vec![Generator::new("x", 1, 1), Generator::new("y", 1, 1), Generator::new("xy", 2, 2)],
        vec![vec![], vec![], vec![(1, k.from_i64(-1))]],
        vec![vec![], vec![], vec![(0, 1, k.one()), (1, 0, k.from_i64(-1))]],
        vec![],
        true,
    )
    .unwrap()
}

/// Words of length ≤ 2 in a (degree 1) and b (degree 2), deconcatenation,
/// with the coderivation extending d b = a. Not cocommutative.
pub fn words2() -> DGCoalgebra {
    let k = q();
    let (one, m1) = (k.one(), k.from_i64(-1));
    // 0 a, 1 b, 2 aa, 3 ab, 4 ba, 5 bb
    DGCoalgebra::new(
        k,
        vec![
            Generator::new("a", 1, 1),
            Generator::new("b", 2, 1),
            Generator::new("aa", 2, 2),
            Generator::new("ab", 3, 2),
            Generator::new("ba", 3, 2),
            Generator::new("bb", 4, 2),
        ],
        vec![
            vec![],
            vec![(0, one.clone())],
            vec![],
            vec![(2, m1)],
            vec![(2, one.clone())],
            vec![(3, one.clone()), (4, one.clone())],
        ],
        vec![
            vec![],
            vec![],
            vec![(0, 0, one.clone())],
            vec![(0, 1, one.clone())],
            vec![(1, 0, one.clone())],
            vec![(1, 1, one)],
        ],
        vec![],
        false,
    )
    .unwrap()
}

#[test]
fn fixtures_build() {
    assert_eq!(words2().len(), 6);
    assert!(!words2().is_cocommutative());
    assert_eq!(aff1().len(), 3);
}

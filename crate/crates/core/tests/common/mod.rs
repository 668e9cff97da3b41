#![allow(dead_code)]

use hybrid_luqr::factorization::HybridConfig;
use hybrid_luqr::matgen::{self, MatrixKind, MatrixSpec};
use hybrid_luqr::tiled::{DenseMatrix, GridConfig, TiledMatrix};

/// One system of the small test corpus.
pub struct Instance {
    pub name: String,
    pub spec: MatrixSpec,
    pub grid: GridConfig,
    pub a: DenseMatrix,
    pub b: Vec<f64>,
}

impl Instance {
    pub fn nb(&self) -> usize {
        self.spec.nb.expect("corpus specs carry nb")
    }

    pub fn tiled(&self) -> TiledMatrix {
        TiledMatrix::from_dense(&self.a, self.nb()).unwrap()
    }

    pub fn config(&self) -> HybridConfig {
        HybridConfig {
            nb: self.nb(),
            grid: self.grid,
            ..HybridConfig::default()
        }
    }
}

/// `(N, nb, grid)` of the corpus shapes; every order is at most 64.
pub const SHAPES: [(usize, usize, (usize, usize)); 3] = [(16, 4, (2, 1)), (32, 4, (2, 2)), (64, 8, (4, 1))];

/// Every generator at every shape, plus extra random seeds.
pub fn corpus() -> Vec<Instance> {
    let mut out = Vec::new();
    for (n, nb, (p, q)) in SHAPES {
        let grid = GridConfig::new(p, q).unwrap();
        let mut specs: Vec<MatrixSpec> = MatrixKind::all().into_iter().map(|k| MatrixSpec::new(k, n, 0)).collect();
        specs.extend((1..4).map(|s| MatrixSpec::new(MatrixKind::Random, n, s)));
        for spec in specs {
            let spec = spec.with_nb(nb);
            let a = matgen::generate(&spec).unwrap();
            let b = matgen::rhs(n, spec.seed);
            out.push(Instance {
                name: format!("{}(n={n},nb={nb},seed={})", spec.kind, spec.seed),
                spec,
                grid,
                a,
                b,
            });
        }
    }
    out
}

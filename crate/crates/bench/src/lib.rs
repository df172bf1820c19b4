//! Shared workload builders for the criterion benchmarks.

use std::path::Path;
use zeig_core::{graph_to_tensor, GraphSpec, SymmetricTensor};

pub use zeig_core::reference::{example1, example2};

/// The 62-node synthetic triangle tensor shipped under fixtures/.
pub fn triangle_tensor_62() -> SymmetricTensor {
    let path =
        Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures/dolphins-synthetic.coord");
    let graph = GraphSpec::read_file(path).expect("fixture present");
    graph_to_tensor(&graph).expect("triangle tensor")
}

/// The starting vector used for the order-3 benchmark's dominant pair.
pub fn example1_start() -> Vec<f64> {
    let raw = [-0.402911f64, 0.903051, -0.148865];
    let norm = raw.iter().map(|v| v * v).sum::<f64>().sqrt();
    raw.iter().map(|v| v / norm).collect()
}

//! The two standard small symmetric test tensors used throughout the tensor
//! eigenvalue literature, kept here so tests, benches and the fixture files
//! all agree on the exact entries.

use crate::tensor::{EntryList, SymmetricTensor};

/// Odd-order benchmark: the 3x3x3 symmetric tensor with four attracting
/// Z-eigenvalue classes near {0.8730, 0.4306, 0.0180, -0.0006}.
pub fn example1() -> SymmetricTensor {
    let entries = vec![
        (vec![1, 1, 1], -0.1281),
        (vec![1, 1, 2], 0.0516),
        (vec![1, 1, 3], -0.0954),
        (vec![1, 2, 2], -0.1958),
        (vec![1, 2, 3], -0.1790),
        (vec![1, 3, 3], -0.2676),
        (vec![2, 2, 2], 0.3251),
        (vec![2, 2, 3], 0.2513),
        (vec![2, 3, 3], 0.1773),
        (vec![3, 3, 3], 0.0338),
    ];
    SymmetricTensor::from_entries(&EntryList::new(3, 3, entries).expect("static entries"))
        .expect("static tensor")
}

/// Even-order benchmark: the 3x3x3x3 symmetric tensor with eleven real
/// eigenpairs, three of them attracting under a convex shift.
pub fn example2() -> SymmetricTensor {
    let entries = vec![
        (vec![1, 1, 1, 1], 0.2883),
        (vec![1, 1, 1, 2], -0.0031),
        (vec![1, 1, 1, 3], 0.1973),
        (vec![1, 1, 2, 2], -0.2485),
        (vec![1, 1, 2, 3], -0.2939),
        (vec![1, 1, 3, 3], 0.3847),
        (vec![1, 2, 2, 2], 0.2972),
        (vec![1, 2, 2, 3], 0.1862),
        (vec![1, 2, 3, 3], 0.0919),
        (vec![1, 3, 3, 3], -0.3619),
        (vec![2, 2, 2, 2], 0.1241),
        (vec![2, 2, 2, 3], -0.3420),
        (vec![2, 2, 3, 3], 0.2127),
        (vec![2, 3, 3, 3], 0.2727),
        (vec![3, 3, 3, 3], -0.3054),
    ];
    SymmetricTensor::from_entries(&EntryList::new(4, 3, entries).expect("static entries"))
        .expect("static tensor")
}

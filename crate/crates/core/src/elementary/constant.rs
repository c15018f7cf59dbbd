//! Edgeless linkage: free inputs and outputs pinned at given values.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::functional::{Field, FunctionalLinkage};
use crate::geom::{Disk, Point};
use crate::linkage::LinkageBuilder;
use crate::placement::PlacementProgram;

/// Constant map `C^m -> C^k` onto `values`, certified everywhere.
pub fn make_constant(values: &[Point], m: usize) -> FunctionalLinkage {
    let mut lb = LinkageBuilder::new();
    let inputs: Vec<_> = (1..=m).map(|j| lb.vertex(&format!("P{j}"))).collect();
    let mut fixed = Vec::with_capacity(values.len());
    let outputs: Vec<_> = values
        .iter()
        .enumerate()
        .map(|(j, &z)| {
            let v = lb.vertex(&format!("Q{}", j + 1));
            lb.mark(v, z);
            fixed.push((v, z));
            v
        })
        .collect();
    FunctionalLinkage {
        linkage: lb.build().expect("constant wiring"),
        inputs,
        outputs,
        field: Field::Complex,
        certified_ball: vec![Disk::plane(); m],
        output_range: values.iter().map(|&z| Disk::point(z)).collect(),
        placement: PlacementProgram { fixed, steps: Vec::new(), bits: 0 },
        walls: Vec::new(),
    }
}

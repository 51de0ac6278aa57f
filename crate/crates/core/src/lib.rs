// Range checks are written `!(x > 0.0)` so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod freeprobe;
pub mod igm;
pub mod linalg;
pub mod partitions;
pub mod symsum;

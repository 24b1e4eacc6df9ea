//! Property tests of the invariants each module promises.

mod boundary;
mod common;
mod conc;
mod minors;
mod poly;
mod qcb;

pub mod cr;
pub mod mwc;

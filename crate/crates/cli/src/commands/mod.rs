pub mod drw;
pub mod kth;
pub mod residue;
pub mod semilinear;
pub mod suite;
pub mod witt;

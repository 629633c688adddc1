pub mod hyperfunction;
pub mod measure;
pub mod poly_zeta;
pub mod renorm;
pub mod sg;
pub mod spectrum;
pub mod sturm_liouville;
pub mod zeta;

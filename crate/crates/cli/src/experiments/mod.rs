pub mod e1;
pub mod e2;
pub mod e3;
pub mod e4;

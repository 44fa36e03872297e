pub mod convergence;
pub mod kernel_table;
pub mod solve;
pub mod verify;

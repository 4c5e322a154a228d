pub mod bench;
pub mod decompose;
pub mod generate;
pub mod solve;
pub mod verify;

pub mod assemble;
pub mod hex8;
pub mod linear;
pub mod mesh;
pub mod solve;

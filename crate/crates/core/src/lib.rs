pub mod laurent;
pub mod roots;
pub mod cluster;
pub mod fpoly;
pub mod qchar;
pub mod grass;
pub mod levels;
pub mod verify;

//! Exact angles, lattice arithmetic, ImH vectors and quaternions.

mod angle;
mod lattice;
mod quaternion;
mod vector;

pub use angle::{angle_add, AngleClass};
pub use lattice::{cyclic_distance, is_z_basis, primitive, IntMatrix};
pub use quaternion::{quaternion_moment, Quaternion};
pub use vector::{Direction, FlatVector, ImVector, Tolerance};

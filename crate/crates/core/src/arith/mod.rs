//! Big-integer arithmetic shared by every other module: RSA groups,
//! Montgomery multiplication, primality, and hashing to integers.

pub mod group;
pub mod hash;
pub mod montgomery;
pub mod prime;

pub use group::{
    mod_exp, sequential_square, trapdoor_eval, validate_production_lambda, GroupElement,
    GroupFile, LambdaGrade, RsaGroup, Trapdoor,
};
pub use hash::{be_bytes_fixed, be_bytes_minimal, h_prime, hash_to_int, HashOutput};
pub use montgomery::{Counting, ModRing, MontElem, Montgomery, PlainModulus};
pub use prime::{is_probable_prime, next_prime};

pub mod lambert;
pub mod period;
pub mod rk;
pub mod tape;

//! placeholder
pub struct AttackSpec;
pub enum AttackKind {}
pub struct InjectError;

use std::collections::BTreeSet;
use std::fmt;

use super::types::UnitType;

/// Typing context: term variables bound to unit types, in binding order,
/// plus the type variables in scope.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Context {
    bindings: Vec<(String, UnitType)>,
    tyvars: BTreeSet<String>,
}

impl Context {
    pub fn new() -> Self {
        Self::default()
    }

    /// Rebinding a name drops the earlier binding, so each variable occurs once.
    pub fn extend(&self, name: &str, ty: UnitType) -> Context {
        let mut out = self.clone();
        out.bindings.retain(|(n, _)| n != name);
        out.bindings.push((name.to_string(), ty));
        out
    }

    pub fn with_tyvar(&self, var: &str) -> Context {
        let mut out = self.clone();
        out.tyvars.insert(var.to_string());
        out
    }

    pub fn lookup(&self, name: &str) -> Option<&UnitType> {
        self.bindings.iter().find(|(n, _)| n == name).map(|(_, t)| t)
    }

    pub fn bindings(&self) -> &[(String, UnitType)] {
        &self.bindings
    }

    pub fn tyvars(&self) -> &BTreeSet<String> {
        &self.tyvars
    }

    /// Type variables free in some binding's type.
    pub fn free_type_vars(&self) -> BTreeSet<String> {
        self.bindings.iter().flat_map(|(_, t)| t.free_vars()).collect()
    }

    pub fn names(&self) -> BTreeSet<String> {
        self.bindings.iter().map(|(n, _)| n.clone()).collect()
    }

    pub fn is_empty(&self) -> bool {
        self.bindings.is_empty()
    }
}

impl fmt::Display for Context {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (name, ty)) in self.bindings.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{name}:{ty}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rebinding_replaces() {
        let ctx = Context::new()
            .extend("x", UnitType::var("X"))
            .extend("y", UnitType::var("Y"))
            .extend("x", UnitType::var("Z"));
        assert_eq!(ctx.bindings().len(), 2);
        assert_eq!(ctx.lookup("x"), Some(&UnitType::var("Z")));
        assert_eq!(ctx.to_string(), "y:Y, x:Z");
    }

    #[test]
    fn free_type_vars_of_bindings() {
        let ctx = Context::new().extend("f", UnitType::forall("X", UnitType::var("X")));
        assert!(ctx.free_type_vars().is_empty());
        let ctx = ctx.extend("y", UnitType::var("Y"));
        assert!(ctx.free_type_vars().contains("Y"));
    }
}

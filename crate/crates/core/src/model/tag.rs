use std::fmt;

/// Constraint family a constraint row belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Family {
    Eq2DragFloor,
    Eq3DragCeiling,
    Eq7EsagEnergy,
    Eq8EsagSplit,
    Eq9EsagUpSplit,
    Eq10EsagDnSplit,
    Eq12EsagDiMode,
    Eq13EsagUpDiMode,
    Eq14EsagDnDiMode,
    Eq15EsagChMode,
    Eq16EsagUpChMode,
    Eq17EsagDnChMode,
    Eq18EsagDiFloor,
    Eq18EsagDiCeiling,
    Eq19EsagChFloor,
    Eq19EsagChCeiling,
    Eq20_1EvcsPower,
    Eq20_2EvcsUp,
    Eq20_3EvcsDn,
    Eq20EvcsCeiling,
    Eq21EvcsFloor,
    Eq23EvcsEnergyMin,
    Eq23EvcsEnergyMax,
    Eq24DdgCeiling,
    Eq25DdgFloor,
    Eq52BalanceP,
    Eq53BalanceQ,
    Eq54VoltageDrop,
    Eq58RegUp,
    Eq59RegDn,
    Eq60AdjP,
    Eq61AdjQ,
    Eq62AdjV,
    /// Rows of hand-built LPs that do not come from the scheduling model.
    Generic,
}

impl Family {
    pub fn code(self) -> &'static str {
        use Family::*;
        match self {
            Eq2DragFloor => "EQ2_DRAG_FLOOR",
            Eq3DragCeiling => "EQ3_DRAG_CEILING",
            Eq7EsagEnergy => "EQ7_ESAG_ENERGY",
            Eq8EsagSplit => "EQ8_ESAG_SPLIT",
            Eq9EsagUpSplit => "EQ9_ESAG_UP_SPLIT",
            Eq10EsagDnSplit => "EQ10_ESAG_DN_SPLIT",
            Eq12EsagDiMode => "EQ12_ESAG_DI_MODE",
            Eq13EsagUpDiMode => "EQ13_ESAG_UP_DI_MODE",
            Eq14EsagDnDiMode => "EQ14_ESAG_DN_DI_MODE",
            Eq15EsagChMode => "EQ15_ESAG_CH_MODE",
            Eq16EsagUpChMode => "EQ16_ESAG_UP_CH_MODE",
            Eq17EsagDnChMode => "EQ17_ESAG_DN_CH_MODE",
            Eq18EsagDiFloor => "EQ18_ESAG_DI_FLOOR",
            Eq18EsagDiCeiling => "EQ18_ESAG_DI_CEILING",
            Eq19EsagChFloor => "EQ19_ESAG_CH_FLOOR",
            Eq19EsagChCeiling => "EQ19_ESAG_CH_CEILING",
            Eq20_1EvcsPower => "EQ20_1_EVCS_POWER",
            Eq20_2EvcsUp => "EQ20_2_EVCS_UP",
            Eq20_3EvcsDn => "EQ20_3_EVCS_DN",
            Eq20EvcsCeiling => "EQ20_EVCS_CEILING",
            Eq21EvcsFloor => "EQ21_EVCS_FLOOR",
            Eq23EvcsEnergyMin => "EQ23_EVCS_ENERGY_MIN",
            Eq23EvcsEnergyMax => "EQ23_EVCS_ENERGY_MAX",
            Eq24DdgCeiling => "EQ24_DDG_CEILING",
            Eq25DdgFloor => "EQ25_DDG_FLOOR",
            Eq52BalanceP => "EQ52_BALANCE_P",
            Eq53BalanceQ => "EQ53_BALANCE_Q",
            Eq54VoltageDrop => "EQ54_VOLTAGE_DROP",
            Eq58RegUp => "EQ58_REG_UP",
            Eq59RegDn => "EQ59_REG_DN",
            Eq60AdjP => "EQ60_ADJ_P",
            Eq61AdjQ => "EQ61_ADJ_Q",
            Eq62AdjV => "EQ62_ADJ_V",
            Generic => "ROW",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

/// Key of one constraint row: family, owner (bus, branch or aggregator id; 0 for
/// system-wide rows), hour label (0 for horizon-wide rows) and scenario id.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ConstraintTag {
    pub family: Family,
    pub owner: u32,
    pub hour: u32,
    pub scenario: Option<u32>,
}

impl ConstraintTag {
    pub fn new(family: Family, owner: u32, hour: u32) -> Self {
        Self {
            family,
            owner,
            hour,
            scenario: None,
        }
    }

    pub fn in_scenario(family: Family, owner: u32, hour: u32, scenario: u32) -> Self {
        Self {
            family,
            owner,
            hour,
            scenario: Some(scenario),
        }
    }

    /// Row name in exchange files: `FAMILY_owner_hour[_scenario]`.
    pub fn name(&self) -> String {
        match self.scenario {
            Some(w) => format!("{}_{}_{}_{}", self.family.code(), self.owner, self.hour, w),
            None => format!("{}_{}_{}", self.family.code(), self.owner, self.hour),
        }
    }
}

impl fmt::Display for ConstraintTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}[owner={}, t={}", self.family, self.owner, self.hour)?;
        if let Some(w) = self.scenario {
            write!(f, ", w={w}")?;
        }
        f.write_str("]")
    }
}

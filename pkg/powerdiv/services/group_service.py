"""
(H2) reports for single groups and the cyclic p-group sweep.
"""

import logging
from typing import Optional

from powerdiv.config.settings import Settings, settings as default_settings
from powerdiv.core.catalog import catalog_sweep
from powerdiv.core.groups import FiniteGroup, conjugacy_classes, h2_check, is_cyclic_p_group
from powerdiv.models.schemas import H2Report, SweepReport

logger = logging.getLogger(__name__)


class GroupService:
    def __init__(self, settings: Optional[Settings] = None):
        """Initialize the group service."""
        self.settings = settings or default_settings

    def h2_report(self, G: FiniteGroup, name: Optional[str] = None) -> H2Report:
        """
        Run the (H2) search on G and record whether the verdict agrees with
        "fails exactly for cyclic p-groups".
        """
        witness = h2_check(G)
        cyclic_p = is_cyclic_p_group(G)
        consistent = (witness.verdict == "fails") == cyclic_p
        if not consistent:
            logger.error("(H2) verdict %s disagrees with cyclic p-group test for %s", witness.verdict, G.name)
        return H2Report(
            group=name or G.name,
            order=G.order,
            n_classes=len(conjugacy_classes(G)),
            is_cyclic_p_group=cyclic_p,
            witness=witness,
            consistent=consistent,
        )

    def sweep(self, max_order: Optional[int] = None) -> SweepReport:
        """(H2) on every catalog group up to max_order; exceptions lists disagreements."""
        max_order = self.settings.sweep_max_order if max_order is None else max_order
        reports = [self.h2_report(G, name) for name, G in catalog_sweep(max_order)]
        exceptions = [r.group for r in reports if not r.consistent]
        logger.info("Swept %d groups up to order %d, %d exception(s)", len(reports), max_order, len(exceptions))
        return SweepReport(max_order=max_order, groups=len(reports), exceptions=exceptions, reports=reports)

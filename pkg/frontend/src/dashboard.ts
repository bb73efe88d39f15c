/**
 * Top-level page assembly: a pure function of (poll state, selection, and
 * any fetched side data), so replaying the same delta log always renders
 * the identical DOM structure.
 */

import { renderBottomBar, renderCardTimeline, renderInitialDataset } from './cards';
import { renderToasts } from './comments';
import { renderStatsPanel } from './histogram';
import { renderQueryBox, renderQueryResult } from './queryBox';
import type { DashboardState, Selection } from './state';
import type { ColumnStats, FramePage, QueryResponse } from './types';

export interface SidePanels {
  stats?: ColumnStats;
  framePage?: FramePage;
  queryText?: string;
  queryResult?: QueryResponse;
  queryError?: string;
}

export function renderDashboard(
  state: DashboardState,
  selection: Selection,
  panels: SidePanels = {},
): string {
  const main =
    selection.view === 'initial' && panels.framePage
      ? renderInitialDataset(panels.framePage)
      : renderCardTimeline(state, selection);
  const side =
    '<aside class="side-panel">' +
    renderQueryBox(panels.queryText ?? '', panels.queryError) +
    (panels.queryResult ? renderQueryResult(panels.queryResult) : '') +
    (panels.stats ? renderStatsPanel(panels.stats) : '') +
    '</aside>';
  return (
    '<div class="dashboard">' +
    `<main class="dashboard__main">${main}</main>` +
    side +
    renderBottomBar(state, selection) +
    renderToasts(state.toasts) +
    '</div>'
  );
}

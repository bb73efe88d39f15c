/**
 * Card timeline, navigator, bottom bar, and the Initial Dataset table.
 */

import { renderCommentsPanel } from './comments';
import { classes, escapeHtml } from './html';
import { renderModelMetricsTable } from './metrics';
import { renderSnapGrid } from './snapgrid';
import {
  cardComments,
  cardHasUnread,
  selectedCards,
  type DashboardState,
  type Selection,
} from './state';
import type { Card, FramePage } from './types';

const KIND_LABEL: Record<string, string> = {
  dataset_loading: 'Dataset Loading',
  missing_value_imputation: 'Missing Value Imputation',
  replace_missing_with_label: 'Replacing Missing Values with Label',
  outlier_removal: 'Outlier Removal',
  one_hot_encoding: 'One-hot Encoding',
  categorical_to_numeric: 'Transformation from Categorical to Numeric',
  feature_filtering: 'Feature Filtering',
  dataset_splitting: 'Dataset Splitting',
  model_training: 'Model Training',
  other: 'Data Operation',
};

export function kindLabel(kind: string): string {
  return KIND_LABEL[kind] ?? KIND_LABEL.other;
}

export function renderNavigator(cards: Card[], selection: Selection, state: DashboardState): string {
  const circles = cards
    .map((card) => {
      const active = selection.version === card.version;
      return (
        `<button class="${classes('navigator__circle', active && 'is-active')}" ` +
        `data-version="${card.version}" aria-label="card ${card.version}">` +
        `${card.version}` +
        (cardHasUnread(state, card) ? '<span class="navigator__dot" title="new comments"></span>' : '') +
        '</button>'
      );
    })
    .join('');
  return `<nav class="navigator" aria-label="card navigator">${circles}</nav>`;
}

export function renderCard(card: Card, state: DashboardState): string {
  return (
    `<article class="card" data-variable="${escapeHtml(card.variable)}" data-version="${card.version}">` +
    `<header class="card__header"><span class="card__kind">${escapeHtml(kindLabel(card.operation_kind))}</span>` +
    `<span class="card__id">${escapeHtml(card.variable)} · v${card.version}</span></header>` +
    `<p class="card__summary">${escapeHtml(card.summary)}</p>` +
    renderSnapGrid(card.snapgrid) +
    (card.model_metadata ? renderModelMetricsTable(card.model_metadata) : '') +
    renderCommentsPanel(cardComments(state, card)) +
    '</article>'
  );
}

export function renderCardTimeline(state: DashboardState, selection: Selection): string {
  const cards = selectedCards(state, selection);
  const shown =
    selection.version === null ? cards : cards.filter((c) => c.version === selection.version);
  return (
    '<div class="timeline">' +
    renderNavigator(cards, selection, state) +
    `<div class="timeline__cards">${shown.map((card) => renderCard(card, state)).join('')}</div>` +
    '</div>'
  );
}

export function renderBottomBar(state: DashboardState, selection: Selection): string {
  const variable = selection.variable ?? state.variables[0] ?? '';
  const options = state.variables
    .map(
      (name) =>
        `<option value="${escapeHtml(name)}"${name === variable ? ' selected' : ''}>` +
        `${escapeHtml(name)}${state.unread[name] ? ' ●' : ''}</option>`,
    )
    .join('');
  return (
    '<footer class="bottom-bar">' +
    `<button class="${classes('bottom-bar__view', selection.view === 'initial' && 'is-active')}" data-view="initial">Initial Dataset</button>` +
    `<button class="${classes('bottom-bar__view', selection.view === 'history' && 'is-active')}" data-view="history">Data Operation History</button>` +
    `<label class="bottom-bar__variable">Variable <select name="variable">${options}</select></label>` +
    '</footer>'
  );
}

export function renderInitialDataset(page: FramePage): string {
  const header = page.columns.map((c) => `<th>${escapeHtml(c.name)}</th>`).join('');
  const body = page.rows
    .map((row, i) => {
      const cells = row
        .map((value) => `<td>${value === null ? '' : escapeHtml(value)}</td>`)
        .join('');
      return `<tr><th scope="row">${page.row_ids[i]}</th>${cells}</tr>`;
    })
    .join('');
  const from = page.offset + 1;
  const to = page.offset + page.row_ids.length;
  return (
    '<section class="initial-dataset">' +
    `<h2>Initial Dataset: ${escapeHtml(page.variable)}</h2>` +
    `<table class="initial-dataset__table"><thead><tr><th>row</th>${header}</tr></thead>` +
    `<tbody>${body}</tbody></table>` +
    `<p class="initial-dataset__pager">rows ${from}–${to} of ${page.total_rows}</p>` +
    '</section>'
  );
}

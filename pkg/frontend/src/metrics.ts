/** Model metadata table shown on the training variable's card. */

import { escapeHtml } from './html';
import type { ModelMetadata } from './types';

export function renderModelMetricsTable(meta: ModelMetadata): string {
  const rows = meta.metrics
    .map(
      (metric) =>
        '<tr>' +
        `<td>${escapeHtml(metric.name)}</td>` +
        `<td><code>${escapeHtml(metric.variable)}</code></td>` +
        `<td>${metric.value === null ? '—' : escapeHtml(metric.value)}</td>` +
        '</tr>',
    )
    .join('');
  return (
    '<section class="model-metrics">' +
    `<h3>Model: ${escapeHtml(meta.model_name)}</h3>` +
    `<p class="model-metrics__vars">train: ${escapeHtml(meta.train_variables.join(', ') || '—')}` +
    ` &middot; test: ${escapeHtml(meta.test_variables.join(', ') || '—')}</p>` +
    '<table class="model-metrics__table">' +
    '<thead><tr><th>Metric</th><th>Variable</th><th>Value</th></tr></thead>' +
    `<tbody>${rows}</tbody></table></section>`
  );
}

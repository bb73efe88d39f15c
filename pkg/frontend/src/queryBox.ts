/**
 * Natural-language query box. Submits to POST /query/{variable}/{version};
 * on success the selected card's SnapGrid re-renders with the matching rows
 * and yellow-border cells; on a parse error the compiler's message (with
 * its nearest-candidate hints) is shown instead.
 */

import { escapeHtml } from './html';
import { renderSnapGrid } from './snapgrid';
import type { QueryResponse } from './types';

export interface QueryHttpReply {
  status: number;
  body: QueryResponse | { detail: string };
}

export type QueryFetcher = (
  variable: string,
  version: number,
  text: string,
) => Promise<QueryHttpReply>;

export type QueryOutcome =
  | { ok: true; response: QueryResponse }
  | { ok: false; message: string };

export async function submitQuery(
  fetcher: QueryFetcher,
  variable: string,
  version: number,
  text: string,
): Promise<QueryOutcome> {
  let reply: QueryHttpReply;
  try {
    reply = await fetcher(variable, version, text);
  } catch (error) {
    return { ok: false, message: `query failed: ${String(error)}` };
  }
  if (reply.status >= 400 || !('snapgrid' in reply.body)) {
    const detail = 'detail' in reply.body ? reply.body.detail : `status ${reply.status}`;
    return { ok: false, message: detail };
  }
  return { ok: true, response: reply.body };
}

export function renderQueryBox(text: string, error?: string): string {
  return (
    '<form class="query-box">' +
    `<input type="text" name="query" placeholder="e.g. WritingScore is below 75" value="${escapeHtml(text)}">` +
    '<button type="submit">Filter</button>' +
    (error ? `<p class="query-box__error" role="alert">${escapeHtml(error)}</p>` : '') +
    '</form>'
  );
}

/** The queried card body: conditions echo plus the re-rendered grid. */
export function renderQueryResult(response: QueryResponse): string {
  const conditions = response.conditions
    .map(
      (c) =>
        `<li><code>${escapeHtml(c.column)} ${escapeHtml(c.operator)} ${escapeHtml(c.value)}</code></li>`,
    )
    .join('');
  return (
    '<section class="query-result">' +
    `<ul class="query-result__conditions">${conditions}</ul>` +
    `<p class="query-result__count">${response.matching_row_ids.length} matching rows</p>` +
    renderSnapGrid(response.snapgrid) +
    '</section>'
  );
}

/** Per-card comment thread, and the new-comment toast. */

import { escapeHtml } from './html';
import type { CommentData } from './types';

const ROLE_LABEL: Record<string, string> = {
  domain_expert: 'Domain expert',
  data_scientist: 'Data scientist',
};

export function renderCommentsPanel(comments: CommentData[]): string {
  const items = comments
    .map(
      (comment) =>
        `<li class="comment" data-id="${escapeHtml(comment.id)}">` +
        `<span class="comment__author">${escapeHtml(ROLE_LABEL[comment.author_role] ?? comment.author_role)}</span>` +
        `<time>${escapeHtml(comment.created_at)}</time>` +
        `<p>${escapeHtml(comment.text)}</p></li>`,
    )
    .join('');
  return (
    '<section class="comments">' +
    `<h3>Comments (${comments.length})</h3>` +
    (comments.length ? `<ul class="comments__thread">${items}</ul>` : '<p class="comments__empty">No comments yet.</p>') +
    '<form class="comments__form"><textarea name="text" placeholder="Send a comment"></textarea>' +
    '<button type="submit">Send</button></form></section>'
  );
}

export function renderToasts(toasts: string[]): string {
  if (!toasts.length) return '';
  const items = toasts
    .map((text) => `<div class="toast" role="status">${escapeHtml(text)}</div>`)
    .join('');
  return `<div class="toast-stack">${items}</div>`;
}

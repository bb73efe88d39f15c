/**
 * Poll-driven state store. The service is the single source of truth:
 * deltas from GET /poll are folded in, card data is never mutated locally,
 * and rendering is a pure function of (state, selection).
 */

import type { Card, CommentData, SyncDelta } from './types';

/** The dashboard is the domain expert's surface; polls identify as this role. */
export const VIEWER_ROLE = 'domain_expert';

export interface DashboardState {
  variables: string[];
  cardsByVariable: Record<string, Card[]>;
  commentsByCard: Record<string, CommentData[]>;
  unread: Record<string, boolean>;
  toasts: string[];
  cursor: number;
  pollSeconds: number;
}

export interface Selection {
  variable: string | null;
  version: number | null;
  view: 'history' | 'initial';
}

export function emptyState(): DashboardState {
  return {
    variables: [],
    cardsByVariable: {},
    commentsByCard: {},
    unread: {},
    toasts: [],
    cursor: 0,
    pollSeconds: 15,
  };
}

export function initialSelection(): Selection {
  return { variable: null, version: null, view: 'history' };
}

export function commentKey(variable: string, version: number): string {
  return `${variable}:${version}`;
}

/** Fold one sync delta into the state; idempotent per card/comment id. */
export function applyDelta(state: DashboardState, delta: SyncDelta): DashboardState {
  const cardsByVariable: Record<string, Card[]> = { ...state.cardsByVariable };
  const variables = [...state.variables];
  for (const card of delta.cards) {
    const existing = cardsByVariable[card.variable] ?? [];
    const replaced = existing.filter((c) => c.version !== card.version);
    replaced.push(card);
    replaced.sort((a, b) => a.version - b.version);
    cardsByVariable[card.variable] = replaced;
    if (!variables.includes(card.variable)) {
      variables.push(card.variable);
    }
  }

  const commentsByCard: Record<string, CommentData[]> = { ...state.commentsByCard };
  for (const comment of delta.comments) {
    const key = commentKey(comment.variable, comment.version);
    const thread = (commentsByCard[key] ?? []).filter((c) => c.id !== comment.id);
    thread.push(comment);
    thread.sort((a, b) => (a.created_at < b.created_at ? -1 : a.created_at > b.created_at ? 1 : 0));
    commentsByCard[key] = thread;
  }

  return {
    variables,
    cardsByVariable,
    commentsByCard,
    unread: { ...state.unread, ...delta.unread },
    toasts: [...state.toasts, ...delta.notifications],
    cursor: delta.next_cursor,
    pollSeconds: delta.poll_seconds,
  };
}

export function replayDeltaLog(deltas: SyncDelta[]): DashboardState {
  return deltas.reduce((state, delta) => applyDelta(state, delta), emptyState());
}

export function selectedCards(state: DashboardState, selection: Selection): Card[] {
  const variable = selection.variable ?? state.variables[0];
  if (!variable) return [];
  return state.cardsByVariable[variable] ?? [];
}

export function cardComments(state: DashboardState, card: Card): CommentData[] {
  return state.commentsByCard[commentKey(card.variable, card.version)] ?? [];
}

/** Red-dot rule: the delivered card said so, or the thread holds a comment
 * the viewer has not fetched-as-read. */
export function cardHasUnread(state: DashboardState, card: Card, viewer = VIEWER_ROLE): boolean {
  if (card.has_unread) return true;
  return cardComments(state, card).some((c) => !c.read_by.includes(viewer));
}

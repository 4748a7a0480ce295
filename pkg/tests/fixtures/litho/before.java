class EditTextWithEventHandlers extends EditText {

  @Override
  protected void onTextChanged(CharSequence text, int start, int lengthBefore, int lengthAfter) {
    super.onTextChanged(text, start, lengthBefore, lengthAfter);
    if (mTextChangedEventHandler != null) {
      EditTextComponent.dispatchTextChangedEvent(
          mTextChangedEventHandler, EditTextWithEventHandlers.this, text.toString());
    }
    if (mTextState != null) {
      mTextState.set(text.toString());
    }
    // Line count of changed text.
    int lineCount = getLineCount();
    if (mLineCount != UNMEASURED_LINE_COUNT
        && (mLineCount < mMinLines || mLineCount > mMaxLines)
        && mLineCount != lineCount) {
      requestLayout();
    }
  }
}

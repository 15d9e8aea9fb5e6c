static void emit_frame(char *buf, int len, int cap)
{
    int n;
    n = len;
    if (n <= cap)
        emit(buf, n);
}

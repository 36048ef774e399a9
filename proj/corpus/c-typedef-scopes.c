typedef int T;

/* T is a type name */

int main() {
  int T = 0;
  /* Here, T is a variable */
  {
    typedef double T;
    /* Here, T is a type name */
    printf("T=%d\n", sizeof(T));
  }
  /* Again, T is a variable */
  printf("T=%d\n", T);
  return T;
}
/* Again, T is a type name */
T t;
